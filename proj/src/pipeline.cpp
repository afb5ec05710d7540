#include "adaudit/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adaudit/audience.hpp"
#include "adaudit/clients.hpp"
#include "adaudit/csv.hpp"
#include "adaudit/errors.hpp"
#include "adaudit/experiment.hpp"
#include "adaudit/log.hpp"
#include "adaudit/rng.hpp"
#include "adaudit/simulator.hpp"
#include "adaudit/stats.hpp"
#include "adaudit/voterdata.hpp"

#include <nlohmann/json.hpp>

namespace adaudit::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("missing config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return j;
}

// Paths in configs are used as written (absolute, or relative to the
// working directory).
std::string resolve(const std::string& /*config_path*/, const std::string& p) { return p; }

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot hash " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    char out[32];
    std::snprintf(out, sizeof(out), "fnv:%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.str())));
    return out;
}

std::string fmt(double v, const char* spec) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

voter::DmaGroup group_from_json(const json& j) {
    voter::DmaGroup g;
    g.group_id = j.at("group_id").get<std::string>();
    for (const auto& n : j.at("names")) g.dma_names.insert(n.get<std::string>());
    if (g.dma_names.empty()) throw ConfigError("group " + g.group_id + " has no regions");
    return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

IngestOutput run_ingest(const Options& opts) {
    const json cfg = load_json_file(opts.config_path);
    const std::string voter_file = resolve(opts.config_path, cfg.at("voter_file").get<std::string>());

    const json& sj = cfg.at("schema");
    voter::VoterSchema schema;
    schema.id_column = sj.value("id_column", "");
    schema.race_column = sj.value("race_column", "");
    schema.state_column = sj.value("state_column", "");
    schema.dma_column = sj.value("dma_column", "");
    schema.county_column = sj.value("county_column", "");
    schema.contact_key_column = sj.value("contact_key_column", "");
    if (sj.contains("race_codes")) {
        for (const auto& [code, name] : sj.at("race_codes").items()) {
            auto race = voter::race_from_name(name.get<std::string>());
            if (!race) throw ConfigError("unknown race in race_codes: " + name.get<std::string>());
            schema.race_codes[code] = *race;
        }
    }
    if (sj.contains("dma_lookup")) {
        for (const auto& [county, dma] : sj.at("dma_lookup").items()) {
            schema.dma_lookup[county] = dma.get<std::string>();
        }
    }

    auto result = voter::ingest_voter_file(voter_file, schema);
    log::info("ingested " + std::to_string(result.rows_ingested) + " rows from " + voter_file);

    fs::create_directories(opts.out_dir);
    IngestOutput out;
    out.rows_ingested = result.rows_ingested;
    out.voters_csv = (fs::path(opts.out_dir) / "voters.csv").string();
    voter::write_normalized(result.dataset, out.voters_csv);

    if (cfg.contains("summary_groups")) {
        std::vector<voter::DmaGroup> groups;
        for (const auto& gj : cfg.at("summary_groups")) groups.push_back(group_from_json(gj));
        const bool by_state = cfg.value("summary_by_state", false);
        const auto summary = voter::summarize(result.dataset, groups, by_state);
        out.summary_csv = (fs::path(opts.out_dir) / "summary.csv").string();
        voter::write_summary_csv(summary, out.summary_csv);
    }
    return out;
}

// ---------------------------------------------------------------------------
// build-audience
// ---------------------------------------------------------------------------

AudienceOutput run_build_audience(const Options& opts) {
    const json cfg = load_json_file(opts.config_path);
    const std::string voters = resolve(opts.config_path, cfg.at("voters").get<std::string>());
    const auto dataset = voter::load_normalized(voters);

    const auto key = audience::region_key_from_name(cfg.value("region_key", "dma"));
    const auto black_group = group_from_json(cfg.at("black_group"));
    const auto white_group = group_from_json(cfg.at("white_group"));
    const std::uint64_t per_race_size = cfg.at("per_race_size").get<std::uint64_t>();
    const std::uint64_t k = cfg.value("partitions", std::uint64_t{1});
    const bool build_flipped = cfg.value("build_flipped", false);
    const std::string prefix = cfg.value("name_prefix", "aud");
    const std::uint64_t seed = opts.seed.value_or(cfg.value("seed", std::uint64_t{0}));

    auto partitions = audience::disjoint_partitions(dataset, black_group, white_group,
                                                    per_race_size, seed, prefix, k, key);
    if (build_flipped) {
        const std::size_t originals = partitions.size();
        for (std::size_t i = 0; i < originals; ++i) {
            partitions.push_back(audience::flip(dataset, partitions[i]));
        }
    }

    AudienceOutput out;
    out.audience_dir = (fs::path(opts.out_dir) / "audiences").string();
    fs::create_directories(out.audience_dir);
    for (const auto& p : partitions) {
        p.check_invariants();
        audience::write_manifest_csv(p, (fs::path(out.audience_dir) / (p.name + ".csv")).string());
        audience::write_sidecar_json(p, (fs::path(out.audience_dir) / (p.name + ".json")).string());
        out.partition_names.push_back(p.name);
    }
    log::info("built " + std::to_string(partitions.size()) + " audience partitions");
    return out;
}

// ---------------------------------------------------------------------------
// pair-schools
// ---------------------------------------------------------------------------

namespace {

catalog::ShortlistCriteria criteria_from_json(const json& cfg) {
    catalog::ShortlistCriteria c;
    if (!cfg.contains("criteria")) return c;
    const json& j = cfg.at("criteria");
    c.require_four_year = j.value("require_four_year", c.require_four_year);
    c.require_online_program = j.value("require_online_program", c.require_online_program);
    c.min_enrollment = j.value("min_enrollment", c.min_enrollment);
    c.require_active_page = j.value("require_active_page", c.require_active_page);
    c.require_active_advertiser = j.value("require_active_advertiser", c.require_active_advertiser);
    c.admit_rate_floor = j.value("admit_rate_floor", c.admit_rate_floor);
    c.admit_floor_warn_only = j.value("admit_floor_warn_only", c.admit_floor_warn_only);
    return c;
}

std::vector<catalog::School> pick_by_name(const std::vector<catalog::School>& schools,
                                          const json& names) {
    std::vector<catalog::School> out;
    for (const auto& nj : names) {
        const auto name = nj.get<std::string>();
        auto it = std::find_if(schools.begin(), schools.end(),
                               [&](const catalog::School& s) { return s.name == name; });
        if (it == schools.end()) throw ConfigError("school not in catalog: " + name);
        out.push_back(*it);
    }
    return out;
}

}  // namespace

PairOutput run_pair_schools(const Options& opts) {
    const json cfg = load_json_file(opts.config_path);
    const std::string catalog_path = resolve(opts.config_path, cfg.at("catalog").get<std::string>());
    const auto schools = catalog::load_catalog_csv(catalog_path);

    PairOutput out;
    if (cfg.contains("explicit_skewed")) {
        // Explicit selection mode: caller fixes the skewed list and the
        // public list order; no de-facto-skew sort.
        const auto skewed = pick_by_name(schools, cfg.at("explicit_skewed"));
        const auto publics = pick_by_name(schools, cfg.at("explicit_public"));
        out.pairs = catalog::pair_schools_explicit(skewed, publics);
    } else {
        const auto skew = catalog::defacto_skew(schools);
        for (const auto& [sector, share] : skew) {
            if (share) {
                log::info(std::string("catalog Black enrollment share, ") +
                          catalog::sector_name(sector) + ": " + std::to_string(*share) + "%");
            }
        }
        auto sl = catalog::shortlist(schools, criteria_from_json(cfg));
        out.warnings = sl.warnings;
        for (const auto& w : sl.warnings) log::warn(w);
        out.pairs = catalog::pair_schools(std::move(sl.for_profit), std::move(sl.publics));
    }

    fs::create_directories(opts.out_dir);
    out.pairs_csv = (fs::path(opts.out_dir) / "pairs.csv").string();
    catalog::write_pairs_csv(out.pairs, out.pairs_csv);
    log::info("paired " + std::to_string(out.pairs.size()) + " schools");
    return out;
}

// ---------------------------------------------------------------------------
// experiment construction shared by simulate and launch
// ---------------------------------------------------------------------------

namespace {

struct ExperimentPlan {
    std::vector<experiment::PairedExperiment> experiments;
    std::vector<ExperimentRef> refs;
    std::string audience_dir;
    std::string pairs_csv;
    experiment::CreativeKind kind = experiment::CreativeKind::Neutral;
    sim::SimConfig sim_cfg;
    double alpha = 0.05;
    std::uint64_t trials = 1;
};

experiment::AdCreative make_creative(const catalog::School& school, experiment::CreativeKind kind,
                                     bool skewed_side) {
    experiment::AdCreative c;
    c.school_name = school.name;
    c.kind = kind;
    c.headline = "Enroll in an online degree program at " + school.name;
    if (kind == experiment::CreativeKind::Neutral) {
        c.image_id = "campus-" + school.name;
        c.image_race_tag = experiment::ImageRaceTag::None;
    } else {
        // Realistic creatives mirror the dominant perceived race in each
        // school's own ad library.
        c.image_id = "ad-library-" + school.name;
        c.image_race_tag = skewed_side ? experiment::ImageRaceTag::PerceivedBlack
                                       : experiment::ImageRaceTag::PerceivedWhite;
    }
    c.destination_url = "https://example.edu/" + school.name + "/online";
    return c;
}

ExperimentPlan build_plan(const Options& opts) {
    const json cfg = load_json_file(opts.config_path);

    ExperimentPlan plan;
    plan.pairs_csv = resolve(opts.config_path, cfg.at("pairs").get<std::string>());
    plan.audience_dir = resolve(opts.config_path, cfg.at("audience_dir").get<std::string>());
    plan.kind = experiment::creative_kind_from_name(cfg.value("creative_kind", "neutral"));
    plan.sim_cfg = cfg.contains("sim") ? sim::SimConfig::from_json(cfg.at("sim")) : sim::SimConfig{};
    plan.alpha = opts.alpha.value_or(cfg.value("alpha", 0.05));
    plan.trials = opts.trials.value_or(cfg.value("trials", std::uint64_t{1}));
    if (opts.seed) plan.sim_cfg.seed = *opts.seed;

    const double budget = cfg.value("budget_usd", 50.0);
    const std::uint32_t duration = cfg.value("duration_hours", 24u);

    const auto pairs = catalog::load_pairs_csv(plan.pairs_csv);
    if (pairs.empty()) throw ValidationError("no pairs in " + plan.pairs_csv);
    if (!cfg.contains("audiences") || cfg.at("audiences").empty()) {
        throw ConfigError("simulate config names no audiences");
    }

    std::vector<std::shared_ptr<const audience::AudiencePartition>> partitions;
    for (const auto& aj : cfg.at("audiences")) {
        const auto name = aj.get<std::string>();
        const auto manifest = (fs::path(plan.audience_dir) / (name + ".csv")).string();
        const auto sidecar = (fs::path(plan.audience_dir) / (name + ".json")).string();
        if (!fs::exists(manifest)) throw MissingArtifactError("missing audience manifest: " + manifest);
        partitions.push_back(std::make_shared<audience::AudiencePartition>(
            audience::load_partition(manifest, sidecar)));
    }

    for (const auto& pair : pairs) {
        for (const auto& partition : partitions) {
            experiment::PairedExperiment exp;
            exp.experiment_id = pair.pair_id + "-" + partition->name;

            exp.campaign_a.campaign_id = exp.experiment_id + "-skewed";
            exp.campaign_a.creative = make_creative(pair.skewed_school, plan.kind, true);
            exp.campaign_a.audience = partition;
            exp.campaign_a.budget_usd = budget;
            exp.campaign_a.duration_hours = duration;

            exp.campaign_b.campaign_id = exp.experiment_id + "-public";
            exp.campaign_b.creative = make_creative(pair.public_school, plan.kind, false);
            exp.campaign_b.audience = partition;
            exp.campaign_b.budget_usd = budget;
            exp.campaign_b.duration_hours = duration;

            ExperimentRef ref;
            ref.experiment_id = exp.experiment_id;
            ref.pair_id = pair.pair_id;
            ref.audience = partition->name;
            ref.skewed_school = pair.skewed_school.name;
            ref.public_school = pair.public_school.name;
            ref.campaign_a_id = exp.campaign_a.campaign_id;
            ref.campaign_b_id = exp.campaign_b.campaign_id;
            ref.snapshot_log = "snapshots/" + exp.experiment_id + ".csv";

            plan.experiments.push_back(std::move(exp));
            plan.refs.push_back(std::move(ref));
        }
    }
    return plan;
}

}  // namespace

// ---------------------------------------------------------------------------
// run manifest
// ---------------------------------------------------------------------------

void RunManifest::save(const std::string& path) const {
    json j;
    j["seed"] = seed;
    j["trials"] = trials;
    j["alpha"] = alpha;
    j["creative_kind"] = creative_kind;
    j["audience_dir"] = audience_dir;
    j["pairs_csv"] = pairs_csv;
    j["montecarlo_csv"] = montecarlo_csv;
    j["config_hashes"] = config_hashes;
    j["experiments"] = json::array();
    for (const auto& e : experiments) {
        j["experiments"].push_back({{"experiment_id", e.experiment_id},
                                    {"pair_id", e.pair_id},
                                    {"audience", e.audience},
                                    {"skewed_school", e.skewed_school},
                                    {"public_school", e.public_school},
                                    {"campaign_a_id", e.campaign_a_id},
                                    {"campaign_b_id", e.campaign_b_id},
                                    {"snapshot_log", e.snapshot_log}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
}

RunManifest RunManifest::load(const std::string& path) {
    const json j = load_json_file(path);
    RunManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.trials = j.at("trials").get<std::uint64_t>();
    m.alpha = j.at("alpha").get<double>();
    m.creative_kind = j.at("creative_kind").get<std::string>();
    m.audience_dir = j.at("audience_dir").get<std::string>();
    m.pairs_csv = j.at("pairs_csv").get<std::string>();
    m.montecarlo_csv = j.at("montecarlo_csv").get<std::string>();
    if (j.contains("config_hashes")) {
        for (const auto& [k, v] : j.at("config_hashes").items()) {
            m.config_hashes[k] = v.get<std::string>();
        }
    }
    for (const auto& ej : j.at("experiments")) {
        ExperimentRef e;
        e.experiment_id = ej.at("experiment_id").get<std::string>();
        e.pair_id = ej.at("pair_id").get<std::string>();
        e.audience = ej.at("audience").get<std::string>();
        e.skewed_school = ej.at("skewed_school").get<std::string>();
        e.public_school = ej.at("public_school").get<std::string>();
        e.campaign_a_id = ej.at("campaign_a_id").get<std::string>();
        e.campaign_b_id = ej.at("campaign_b_id").get<std::string>();
        e.snapshot_log = ej.at("snapshot_log").get<std::string>();
        m.experiments.push_back(std::move(e));
    }
    return m;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

SimulateOutput run_simulate(const Options& opts) {
    ExperimentPlan plan = build_plan(opts);
    fs::create_directories(fs::path(opts.out_dir) / "snapshots");

    SimulateOutput out;
    RunManifest manifest;
    manifest.seed = plan.sim_cfg.seed;
    manifest.trials = plan.trials;
    manifest.alpha = plan.alpha;
    manifest.creative_kind = experiment::creative_kind_name(plan.kind);
    manifest.audience_dir = plan.audience_dir;
    manifest.pairs_csv = plan.pairs_csv;
    manifest.montecarlo_csv = "montecarlo.csv";
    manifest.experiments = plan.refs;
    manifest.config_hashes["config"] = hash_file(opts.config_path);
    manifest.config_hashes["pairs"] = hash_file(plan.pairs_csv);

    // Exemplar run per experiment through the launch/poll path, persisted as
    // the snapshot log that analyze consumes. Wall-clock launch times go to a
    // timing sidecar so every analysis artifact stays byte-reproducible.
    json timing;
    std::vector<std::vector<sim::TrialStats>> trial_rows(plan.experiments.size());
    for (std::size_t i = 0; i < plan.experiments.size(); ++i) {
        const auto& exp = plan.experiments[i];
        sim::SimConfig exp_cfg = plan.sim_cfg;
        exp_cfg.seed = Rng::derive(plan.sim_cfg.seed, fnv1a64(exp.experiment_id));

        clients::SimulatorClient client(exp_cfg);
        auto run = experiment::launch(exp, client);
        timing["launch_time_epoch_s"][exp.experiment_id] = run.exp.launch_time_epoch_s;
        const auto log_path = fs::path(opts.out_dir) / plan.refs[i].snapshot_log;
        experiment::SnapshotLog log(log_path.string());
        experiment::poll(run, 1.0, &log);
        log.close();
        out.snapshot_logs.push_back(log_path.string());
        out.experiment_ids.push_back(exp.experiment_id);

        trial_rows[i] = sim::run_trials(exp, exp_cfg, plan.trials, plan.alpha);
    }
    {
        std::ofstream ts(fs::path(opts.out_dir) / "timing.json", std::ios::binary);
        if (!ts) throw IoError("cannot write timing sidecar");
        ts << timing.dump(2) << '\n';
    }

    // Family-wise Monte Carlo export: per trial, Holm across the experiment
    // family.
    out.montecarlo_csv = (fs::path(opts.out_dir) / manifest.montecarlo_csv).string();
    {
        csv::Writer w(out.montecarlo_csv);
        w.row({"experiment_id", "trial", "n_f_b", "n_f_w", "n_p_b", "n_p_w", "D", "Z", "p",
               "reject", "holm_reject"});
        for (std::uint64_t t = 0; t < plan.trials; ++t) {
            std::vector<double> p_family;
            p_family.reserve(plan.experiments.size());
            for (std::size_t i = 0; i < plan.experiments.size(); ++i) {
                p_family.push_back(trial_rows[i][t].p);
            }
            const auto holm = stats::holm_correct(p_family, plan.alpha);
            for (std::size_t i = 0; i < plan.experiments.size(); ++i) {
                const auto& r = trial_rows[i][t];
                w.row({plan.refs[i].experiment_id, std::to_string(t), std::to_string(r.n_f_b),
                       std::to_string(r.n_f_w), std::to_string(r.n_p_b), std::to_string(r.n_p_w),
                       fmt(r.d, "%.6f"), fmt(r.z, "%.4f"), fmt(r.p, "%.6g"),
                       r.reject ? "1" : "0", holm.reject[i] ? "1" : "0"});
            }
        }
        w.close();
    }

    out.manifest_path = (fs::path(opts.out_dir) / "manifest.json").string();
    manifest.save(out.manifest_path);
    log::info("simulated " + std::to_string(plan.experiments.size()) + " experiments x " +
              std::to_string(plan.trials) + " trials");
    return out;
}

// ---------------------------------------------------------------------------
// launch --dry-run
// ---------------------------------------------------------------------------

LaunchOutput run_launch_dry(const Options& opts) {
    const json cfg = load_json_file(opts.config_path);
    ExperimentPlan plan = build_plan(opts);

    std::map<std::string, experiment::ApprovalState> approvals;
    if (cfg.contains("approvals")) {
        for (const auto& [campaign, state] : cfg.at("approvals").items()) {
            const auto s = state.get<std::string>();
            if (s == "approved") approvals[campaign] = experiment::ApprovalState::Approved;
            else if (s == "pending") approvals[campaign] = experiment::ApprovalState::Pending;
            else if (s == "denied") approvals[campaign] = experiment::ApprovalState::Denied;
            else throw ConfigError("unknown approval state: " + s);
        }
    }

    const auto requests_dir = (fs::path(opts.out_dir) / "requests").string();
    clients::DryRunClient client(requests_dir, approvals);
    for (const auto& exp : plan.experiments) {
        experiment::launch(exp, client);  // throws naming the campaign on denial
    }

    LaunchOutput out;
    out.request_files = client.written_requests();
    json summary;
    summary["requests"] = out.request_files;
    summary["experiments"] = json::array();
    for (const auto& r : plan.refs) summary["experiments"].push_back(r.experiment_id);
    out.summary_json = (fs::path(opts.out_dir) / "dryrun.json").string();
    std::ofstream sj(out.summary_json, std::ios::binary);
    if (!sj) throw IoError("cannot write " + out.summary_json);
    sj << summary.dump(2) << '\n';
    return out;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

namespace {

struct PartitionMeta {
    std::set<std::string> black_regions;
    std::set<std::string> white_regions;
};

PartitionMeta load_partition_meta(const std::string& sidecar_path) {
    const json j = load_json_file(sidecar_path);
    PartitionMeta m;
    for (const auto& n : j.at("black_group").at("names")) m.black_regions.insert(n.get<std::string>());
    for (const auto& n : j.at("white_group").at("names")) m.white_regions.insert(n.get<std::string>());
    return m;
}

std::string manifest_path_of(const std::string& config_path) {
    if (fs::is_directory(config_path)) return (fs::path(config_path) / "manifest.json").string();
    return config_path;
}

}  // namespace

AnalyzeOutput run_analyze(const Options& opts) {
    const std::string manifest_path = manifest_path_of(opts.config_path);
    const RunManifest manifest = RunManifest::load(manifest_path);
    const fs::path run_dir = fs::path(manifest_path).parent_path();
    const double alpha = opts.alpha.value_or(manifest.alpha);

    AnalyzeOutput out;
    std::vector<double> p_family;
    for (const auto& ref : manifest.experiments) {
        const auto log_path = (run_dir / ref.snapshot_log).string();
        if (!fs::exists(log_path)) {
            throw MissingArtifactError("missing artifact for " + ref.experiment_id + ": " +
                                       log_path);
        }
        clients::ReplayClient replay(log_path);
        const auto term_a = replay.terminal(ref.campaign_a_id);
        const auto term_b = replay.terminal(ref.campaign_b_id);

        const auto sidecar = (fs::path(manifest.audience_dir) / (ref.audience + ".json")).string();
        if (!fs::exists(sidecar)) {
            throw MissingArtifactError("missing artifact for " + ref.experiment_id + ": " + sidecar);
        }
        const auto meta = load_partition_meta(sidecar);

        const auto breakdown_a = stats::infer_race(term_a.unique_impressions_by_region,
                                                   meta.black_regions, meta.white_regions);
        const auto breakdown_b = stats::infer_race(term_b.unique_impressions_by_region,
                                                   meta.black_regions, meta.white_regions);
        report::ExperimentRow row;
        row.experiment_id = ref.experiment_id;
        row.audience = ref.audience;
        row.result = stats::skew_test(breakdown_a, breakdown_b, alpha);
        p_family.push_back(row.result.p_value);
        out.rows.push_back(std::move(row));
    }

    const auto holm = stats::holm_correct(p_family, alpha);
    out.holm_significant.assign(holm.reject.begin(), holm.reject.end());

    fs::create_directories(opts.out_dir);
    out.results_csv = (fs::path(opts.out_dir) / "results.csv").string();
    {
        csv::Writer w(out.results_csv);
        w.row({"experiment_id", "audience", "n_f", "n_p", "s_f_b", "s_p_b", "D", "Z", "p",
               "significant", "holm_significant"});
        for (std::size_t i = 0; i < out.rows.size(); ++i) {
            const auto& r = out.rows[i].result;
            w.row({out.rows[i].experiment_id, out.rows[i].audience, std::to_string(r.n_f),
                   std::to_string(r.n_p), fmt(r.s_f_b, "%.6f"), fmt(r.s_p_b, "%.6f"),
                   fmt(r.d, "%.6f"), fmt(r.z, "%.4f"), fmt(r.p_value, "%.6g"),
                   r.significant ? "1" : "0", holm.reject[i] ? "1" : "0"});
        }
        w.close();
    }

    out.holm_csv = (fs::path(opts.out_dir) / "holm.csv").string();
    {
        csv::Writer w(out.holm_csv);
        w.row({"rank", "experiment_id", "p", "threshold", "reject"});
        for (std::size_t k = 0; k < holm.order.size(); ++k) {
            w.row({std::to_string(k + 1), out.rows[holm.order[k]].experiment_id,
                   fmt(holm.sorted_p[k], "%.6g"), fmt(holm.thresholds[k], "%.6g"),
                   holm.reject_sorted[k] ? "1" : "0"});
        }
        w.close();
    }

    out.fractions_csv = (fs::path(opts.out_dir) / "fractions.csv").string();
    {
        csv::Writer w(out.fractions_csv);
        w.row({"experiment_id", "campaign", "n", "fraction_black", "ci_lo", "ci_hi"});
        for (const auto& row : out.rows) {
            const auto& r = row.result;
            w.row({row.experiment_id, "skewed", std::to_string(r.n_f), fmt(r.s_f_b, "%.6f"),
                   fmt(r.ci_f.lo, "%.6f"), fmt(r.ci_f.hi, "%.6f")});
            w.row({row.experiment_id, "public", std::to_string(r.n_p), fmt(r.s_p_b, "%.6f"),
                   fmt(r.ci_p.lo, "%.6f"), fmt(r.ci_p.hi, "%.6f")});
        }
        w.close();
    }

    out.analysis_json = (fs::path(opts.out_dir) / "analysis.json").string();
    {
        json j;
        j["alpha"] = alpha;
        j["z_critical"] = stats::table_critical_z(alpha);
        j["results_csv"] = "results.csv";
        j["holm_csv"] = "holm.csv";
        j["fractions_csv"] = "fractions.csv";
        j["pairs_csv"] = manifest.pairs_csv;
        std::ofstream js(out.analysis_json, std::ios::binary);
        if (!js) throw IoError("cannot write " + out.analysis_json);
        js << j.dump(2) << '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

namespace {

std::vector<report::ExperimentRow> rows_from_csvs(const std::string& results_csv,
                                                  const std::string& fractions_csv) {
    auto rt = csv::read_file(results_csv);
    const auto rid = rt.require_column("experiment_id");
    const auto raud = rt.require_column("audience");
    const auto rnf = rt.require_column("n_f");
    const auto rnp = rt.require_column("n_p");
    const auto rsf = rt.require_column("s_f_b");
    const auto rsp = rt.require_column("s_p_b");
    const auto rd = rt.require_column("D");
    const auto rz = rt.require_column("Z");
    const auto rp = rt.require_column("p");
    const auto rsig = rt.require_column("significant");

    std::vector<report::ExperimentRow> rows;
    for (const auto& row : rt.rows) {
        report::ExperimentRow r;
        r.experiment_id = row[rid];
        r.audience = row[raud];
        r.result.n_f = std::stoull(row[rnf]);
        r.result.n_p = std::stoull(row[rnp]);
        r.result.s_f_b = std::stod(row[rsf]);
        r.result.s_p_b = std::stod(row[rsp]);
        r.result.d = std::stod(row[rd]);
        r.result.z = std::stod(row[rz]);
        r.result.p_value = std::stod(row[rp]);
        r.result.significant = row[rsig] == "1";
        rows.push_back(std::move(r));
    }

    auto ft = csv::read_file(fractions_csv);
    const auto fid = ft.require_column("experiment_id");
    const auto fcamp = ft.require_column("campaign");
    const auto flo = ft.require_column("ci_lo");
    const auto fhi = ft.require_column("ci_hi");
    for (const auto& row : ft.rows) {
        for (auto& r : rows) {
            if (r.experiment_id != row[fid]) continue;
            stats::Interval ci{std::stod(row[flo]), std::stod(row[fhi])};
            if (row[fcamp] == "skewed") r.result.ci_f = ci;
            else r.result.ci_p = ci;
        }
    }
    return rows;
}

}  // namespace

ReportOutput run_report(const Options& opts) {
    std::string analysis_path = opts.config_path;
    if (fs::is_directory(analysis_path)) {
        analysis_path = (fs::path(analysis_path) / "analysis.json").string();
    }
    const json aj = load_json_file(analysis_path);
    const fs::path base = fs::path(analysis_path).parent_path();
    const auto results_csv = (base / aj.at("results_csv").get<std::string>()).string();
    const auto fractions_csv = (base / aj.at("fractions_csv").get<std::string>()).string();
    if (!fs::exists(results_csv)) throw MissingArtifactError("missing artifact: " + results_csv);
    if (!fs::exists(fractions_csv)) throw MissingArtifactError("missing artifact: " + fractions_csv);
    const double z_critical = aj.at("z_critical").get<double>();

    const auto rows = rows_from_csvs(results_csv, fractions_csv);

    ReportOutput out;
    fs::create_directories(opts.out_dir);
    for (const auto& row : rows) {
        const auto path = (fs::path(opts.out_dir) / ("fractions-" + row.experiment_id + ".svg"));
        report::write_text_file(path.string(), report::fraction_plot_svg(row));
        out.svg_files.push_back(path.string());
    }
    const auto zpath = (fs::path(opts.out_dir) / "z-chart.svg").string();
    report::write_text_file(zpath, report::z_chart_svg(rows, z_critical));
    out.svg_files.push_back(zpath);

    const std::string pairs_csv = aj.value("pairs_csv", "");
    if (!pairs_csv.empty() && fs::exists(pairs_csv)) {
        const auto pairs = catalog::load_pairs_csv(pairs_csv);
        const auto ppath = (fs::path(opts.out_dir) / "pairs-table.svg").string();
        report::write_text_file(ppath, report::pairs_table_svg(pairs));
        out.svg_files.push_back(ppath);
    }
    return out;
}

}  // namespace adaudit::pipeline
