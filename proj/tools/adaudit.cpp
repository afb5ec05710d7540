#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "adaudit/errors.hpp"
#include "adaudit/log.hpp"
#include "adaudit/pipeline.hpp"

#include <CLI11.hpp>

namespace {

using adaudit::pipeline::Options;

void add_common(CLI::App* cmd, Options& opts, std::optional<std::uint64_t>& seed,
                std::optional<std::uint64_t>& trials, std::optional<double>& alpha) {
    cmd->add_option("--config", opts.config_path, "Config file (JSON)")->required();
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--seed", seed, "Override the config's random seed");
    cmd->add_option("--trials", trials, "Monte Carlo trial count");
    cmd->add_option("--alpha", alpha, "Significance level (default 0.05)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Paired-ad delivery audit workbench"};
    app.require_subcommand(1);

    Options opts;
    std::optional<std::uint64_t> seed, trials;
    std::optional<double> alpha;
    bool dry_run = false;

    auto* ingest = app.add_subcommand("ingest", "Ingest a voter extract into a normalized store");
    auto* build = app.add_subcommand("build-audience", "Build race-inferable audience partitions");
    auto* pair = app.add_subcommand("pair-schools", "Shortlist and pair schools");
    auto* simulate = app.add_subcommand("simulate", "Run paired experiments on the simulator");
    auto* launch = app.add_subcommand("launch", "Construct platform launch requests");
    auto* analyze = app.add_subcommand("analyze", "Compute skew statistics from snapshot logs");
    auto* rep = app.add_subcommand("report", "Render SVG reports from analysis output");
    for (auto* cmd : {ingest, build, pair, simulate, launch, analyze, rep}) {
        add_common(cmd, opts, seed, trials, alpha);
    }
    launch->add_flag("--dry-run", dry_run, "Write requests to disk without any platform calls");

    CLI11_PARSE(app, argc, argv);
    opts.seed = seed;
    opts.trials = trials;
    opts.alpha = alpha;

    try {
        if (ingest->parsed()) {
            const auto out = adaudit::pipeline::run_ingest(opts);
            std::cout << "ingested rows: " << out.rows_ingested << "\n"
                      << "voters: " << out.voters_csv << "\n";
            if (!out.summary_csv.empty()) std::cout << "summary: " << out.summary_csv << "\n";
        } else if (build->parsed()) {
            const auto out = adaudit::pipeline::run_build_audience(opts);
            std::cout << "audiences (" << out.partition_names.size() << ") in "
                      << out.audience_dir << "\n";
        } else if (pair->parsed()) {
            const auto out = adaudit::pipeline::run_pair_schools(opts);
            std::cout << "pairs: " << out.pairs_csv << "\n";
            for (const auto& p : out.pairs) {
                std::cout << "  " << p.pair_id << ": " << p.skewed_school.name << " vs "
                          << p.public_school.name << "\n";
            }
        } else if (simulate->parsed()) {
            const auto out = adaudit::pipeline::run_simulate(opts);
            std::cout << "manifest: " << out.manifest_path << "\n"
                      << "montecarlo: " << out.montecarlo_csv << "\n";
        } else if (launch->parsed()) {
            if (!dry_run) {
                throw adaudit::ConfigError(
                    "live launches are not supported; pass --dry-run to build requests");
            }
            const auto out = adaudit::pipeline::run_launch_dry(opts);
            std::cout << "requests (" << out.request_files.size() << ") in " << out.summary_json
                      << "\n";
        } else if (analyze->parsed()) {
            const auto out = adaudit::pipeline::run_analyze(opts);
            std::cout << "results: " << out.results_csv << "\n";
        } else if (rep->parsed()) {
            const auto out = adaudit::pipeline::run_report(opts);
            std::cout << "svg files: " << out.svg_files.size() << "\n";
        }
    } catch (const std::exception& e) {
        // Findings are data; only faults reach here.
        std::cerr << "adaudit: error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
