#include <doctest.h>

#include <string>

#include "adaudit/report.hpp"

using namespace adaudit;

namespace {

report::ExperimentRow sample_row() {
    report::ExperimentRow row;
    row.experiment_id = "pair-1-aud-nc-1";
    row.audience = "aud-nc-1";
    row.result.n_f = 1500;
    row.result.n_p = 1500;
    row.result.s_f_b = 0.600000;
    row.result.s_p_b = 0.500000;
    row.result.d = 0.100000;
    row.result.z = 5.5048;
    row.result.p_value = 1.85e-8;
    row.result.significant = true;
    row.result.ci_f = {0.574983, 0.624506};
    row.result.ci_p = {0.474729, 0.525271};
    return row;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("fraction plot embeds machine-readable values") {
    const auto svg = report::fraction_plot_svg(sample_row());
    CHECK(contains(svg, "data-experiment=\"pair-1-aud-nc-1\""));
    CHECK(contains(svg, "data-d=\"0.100000\""));
    CHECK(contains(svg, "data-z=\"5.5048\""));
    CHECK(contains(svg, "data-significant=\"1\""));
    CHECK(contains(svg, "data-campaign=\"skewed\""));
    CHECK(contains(svg, "data-s=\"0.600000\""));
    CHECK(contains(svg, "data-lo=\"0.574983\""));
    CHECK(contains(svg, "data-campaign=\"public\""));
    CHECK(contains(svg, "data-s=\"0.500000\""));
    CHECK(contains(svg, "</svg>"));
    CHECK(svg.rfind("<svg", 0) == 0);
}

TEST_CASE("z chart draws the threshold and one bar per experiment") {
    auto row1 = sample_row();
    auto row2 = sample_row();
    row2.experiment_id = "pair-2-aud-nc-1";
    row2.result.z = 0.90;
    row2.result.significant = false;
    const auto svg = report::z_chart_svg({row1, row2}, 1.64);
    CHECK(contains(svg, "data-z-critical=\"1.6400\""));
    CHECK(contains(svg, "class=\"threshold\""));
    CHECK(contains(svg, "data-experiment=\"pair-1-aud-nc-1\""));
    CHECK(contains(svg, "data-experiment=\"pair-2-aud-nc-1\""));
    CHECK(contains(svg, "data-z=\"5.5048\""));
    CHECK(contains(svg, "data-z=\"0.9000\""));
    CHECK(contains(svg, "data-significant=\"0\""));
}

TEST_CASE("pairs table lists each pairing with data attributes") {
    catalog::School fp;
    fp.name = "Strayer University";
    fp.sector = catalog::Sector::ForProfit;
    fp.pct_black = 79;
    fp.pct_white = 13;
    fp.pct_other = 8;
    fp.admit_rate = 100;
    catalog::School pub = fp;
    pub.name = "Colorado State University";
    pub.sector = catalog::Sector::Public;
    pub.pct_black = 7;
    pub.pct_white = 64;
    pub.pct_other = 29;
    const auto svg = report::pairs_table_svg({{"pair-1", fp, pub}});
    CHECK(contains(svg, "data-pair-id=\"pair-1\""));
    CHECK(contains(svg, "data-skewed=\"Strayer University\""));
    CHECK(contains(svg, "data-public=\"Colorado State University\""));
    CHECK(contains(svg, "B=79%"));
}

TEST_CASE("xml-special characters in names are escaped") {
    auto row = sample_row();
    row.experiment_id = "a<b&c";
    const auto svg = report::fraction_plot_svg(row);
    CHECK(contains(svg, "a&lt;b&amp;c"));
    CHECK_FALSE(contains(svg, "a<b&c"));
}
