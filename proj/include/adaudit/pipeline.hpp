#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adaudit/catalog.hpp"
#include "adaudit/report.hpp"

namespace adaudit::pipeline {

// Shared subcommand options; unset fields fall back to config values.
struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<double> alpha;
};

struct IngestOutput {
    std::string voters_csv;
    std::string summary_csv;  // empty when the config names no groups
    std::uint64_t rows_ingested = 0;
};
IngestOutput run_ingest(const Options& opts);

struct AudienceOutput {
    std::string audience_dir;
    std::vector<std::string> partition_names;
};
AudienceOutput run_build_audience(const Options& opts);

struct PairOutput {
    std::string pairs_csv;
    std::vector<catalog::SchoolPair> pairs;
    std::vector<std::string> warnings;
};
PairOutput run_pair_schools(const Options& opts);

// The run manifest ties a simulate/launch run's artifacts together; analyze
// refuses to start unless everything it references exists.
struct ExperimentRef {
    std::string experiment_id;
    std::string pair_id;
    std::string audience;
    std::string skewed_school;
    std::string public_school;
    std::string campaign_a_id;  // skewed-school ad
    std::string campaign_b_id;
    std::string snapshot_log;  // relative to the manifest's directory
};

struct RunManifest {
    std::uint64_t seed = 0;
    std::uint64_t trials = 1;
    double alpha = 0.05;
    std::string creative_kind;
    std::string audience_dir;
    std::string pairs_csv;
    std::string montecarlo_csv;
    std::vector<ExperimentRef> experiments;
    std::map<std::string, std::string> config_hashes;

    void save(const std::string& path) const;
    static RunManifest load(const std::string& path);
};

struct SimulateOutput {
    std::string manifest_path;
    std::string montecarlo_csv;
    std::vector<std::string> snapshot_logs;
    std::vector<std::string> experiment_ids;
};
SimulateOutput run_simulate(const Options& opts);

struct LaunchOutput {
    std::vector<std::string> request_files;
    std::string summary_json;
};
// Dry-run launch: request construction and approval gating only, no
// delivery and no network.
LaunchOutput run_launch_dry(const Options& opts);

struct AnalyzeOutput {
    std::string results_csv;
    std::string holm_csv;
    std::string fractions_csv;
    std::string analysis_json;
    std::vector<report::ExperimentRow> rows;
    std::vector<bool> holm_significant;
};
// opts.config_path points at a run manifest (or the directory holding
// manifest.json).
AnalyzeOutput run_analyze(const Options& opts);

struct ReportOutput {
    std::vector<std::string> svg_files;
};
// opts.config_path points at analyze's output directory (or analysis.json).
ReportOutput run_report(const Options& opts);

}  // namespace adaudit::pipeline
