#pragma once

#include <string>
#include <vector>

#include "adaudit/catalog.hpp"
#include "adaudit/stats.hpp"

namespace adaudit::report {

// One experiment's analyzed outcome, as consumed by the plots.
struct ExperimentRow {
    std::string experiment_id;
    std::string audience;
    stats::SkewResult result;
};

// Dot plot of the two Black fractions with 95% CI whiskers, one row per
// campaign. Data values ride along as data-* attributes so tests and
// downstream tooling can read them back without parsing geometry.
std::string fraction_plot_svg(const ExperimentRow& row);

// Bar chart of Z statistics across the experiment family with the critical
// threshold drawn as a horizontal line.
std::string z_chart_svg(const std::vector<ExperimentRow>& rows, double z_critical);

// Pairing table as an SVG listing.
std::string pairs_table_svg(const std::vector<catalog::SchoolPair>& pairs);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace adaudit::report
