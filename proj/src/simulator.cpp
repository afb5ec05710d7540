#include "adaudit/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>
#include <unordered_map>

#include "adaudit/errors.hpp"
#include "adaudit/rng.hpp"
#include "adaudit/stats.hpp"

namespace adaudit::sim {

using experiment::DeliverySnapshot;
using experiment::PairedExperiment;
using voter::Race;

void SimConfig::validate() const {
    if (match_rate < 0.0 || match_rate > 1.0) throw ConfigError("match_rate must be in [0,1]");
    if (travel_prob < 0.0 || travel_prob > 1.0) throw ConfigError("travel_prob must be in [0,1]");
    if (race_activity_multiplier.black <= 0.0 || race_activity_multiplier.white <= 0.0) {
        throw ConfigError("race_activity_multiplier entries must be positive");
    }
    if (competing_pressure.black < 0.0 || competing_pressure.white < 0.0) {
        throw ConfigError("competing_pressure entries must be nonnegative");
    }
    if (sessions_per_hour < 0.0) throw ConfigError("sessions_per_hour must be nonnegative");
    if (impressions_budget_per_ad == 0) throw ConfigError("impressions budget must be positive");
}

nlohmann::json SimConfig::to_json() const {
    nlohmann::json j;
    j["bias_beta"] = bias_beta;
    j["race_activity_multiplier"] = {{"black", race_activity_multiplier.black},
                                     {"white", race_activity_multiplier.white}};
    j["competing_pressure"] = {{"black", competing_pressure.black},
                               {"white", competing_pressure.white}};
    j["match_rate"] = match_rate;
    j["travel_prob"] = travel_prob;
    j["seed"] = seed;
    j["impressions_budget_per_ad"] = impressions_budget_per_ad;
    j["sessions_per_hour"] = sessions_per_hour;
    j["base_relevance"] = base_relevance;
    return j;
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
    SimConfig c;
    c.bias_beta = j.value("bias_beta", c.bias_beta);
    if (j.contains("race_activity_multiplier")) {
        const auto& m = j.at("race_activity_multiplier");
        c.race_activity_multiplier.black = m.value("black", 1.0);
        c.race_activity_multiplier.white = m.value("white", 1.0);
    }
    if (j.contains("competing_pressure")) {
        const auto& m = j.at("competing_pressure");
        c.competing_pressure.black = m.value("black", 0.0);
        c.competing_pressure.white = m.value("white", 0.0);
    }
    c.match_rate = j.value("match_rate", c.match_rate);
    c.travel_prob = j.value("travel_prob", c.travel_prob);
    c.seed = j.value("seed", c.seed);
    c.impressions_budget_per_ad = j.value("impressions_budget_per_ad", c.impressions_budget_per_ad);
    c.sessions_per_hour = j.value("sessions_per_hour", c.sessions_per_hour);
    c.base_relevance = j.value("base_relevance", c.base_relevance);
    c.validate();
    return c;
}

namespace {

// Everything the per-trial hot loop needs, resolved once per experiment.
struct PreparedSim {
    std::vector<std::uint32_t> member_region;  // per member
    std::vector<std::uint8_t> member_race;     // 0 Black, 1 White
    std::vector<std::string> region_names;     // + out-of-group slot at the end
    std::vector<Race> region_race;
    std::uint32_t out_region = 0;
    std::uint32_t duration = 0;
    double lambda_total[2] = {0, 0};  // expected sessions over the whole run
    double p_win_a[2] = {0, 0};       // per-session win probability, skewed ad
    double p_win_b[2] = {0, 0};
    double match_rate = 1.0;
    double travel_prob = 0.0;
    double sessions_per_hour = 0.0;
    std::uint64_t budget = 0;
};

// Per-session win probabilities: one slot per session, contested by the two
// audit ads and the rest of the platform's inventory (weight 1).
void win_probabilities(const SimConfig& cfg, Race race, double* p_a, double* p_b) {
    const double rel_base = cfg.base_relevance - cfg.competing_pressure.of(race);
    const double rel_a = rel_base + (race == Race::Black ? cfg.bias_beta : 0.0);
    const double w_a = std::exp(rel_a);
    const double w_b = std::exp(rel_base);
    const double z = 1.0 + w_a + w_b;
    *p_a = w_a / z;
    *p_b = w_b / z;
}

PreparedSim prepare(const PairedExperiment& exp, const SimConfig& cfg) {
    cfg.validate();
    if (!exp.campaign_a.audience || !exp.campaign_b.audience) {
        throw ValidationError(exp.experiment_id + ": campaigns without audience");
    }
    if (exp.campaign_a.audience != exp.campaign_b.audience &&
        exp.campaign_a.audience->name != exp.campaign_b.audience->name) {
        throw ValidationError(exp.experiment_id + ": campaigns target different partitions");
    }
    const auto& partition = *exp.campaign_a.audience;
    if (partition.members.empty()) {
        throw ValidationError(exp.experiment_id + ": empty audience");
    }

    PreparedSim p;
    p.duration = exp.campaign_a.duration_hours;
    p.match_rate = cfg.match_rate;
    p.travel_prob = cfg.travel_prob;
    p.sessions_per_hour = cfg.sessions_per_hour;
    p.budget = cfg.impressions_budget_per_ad;

    std::unordered_map<std::string, std::uint32_t> region_ids;
    p.member_region.reserve(partition.members.size());
    p.member_race.reserve(partition.members.size());
    for (const auto& m : partition.members) {
        auto [it, inserted] =
            region_ids.emplace(m.region, static_cast<std::uint32_t>(p.region_names.size()));
        if (inserted) {
            p.region_names.push_back(m.region);
            p.region_race.push_back(m.race);
        }
        p.member_region.push_back(it->second);
        p.member_race.push_back(m.race == Race::Black ? 0 : 1);
    }
    p.out_region = static_cast<std::uint32_t>(p.region_names.size());
    p.region_names.push_back(kOutOfGroupRegion);
    p.region_race.push_back(Race::Other);

    for (Race race : {Race::Black, Race::White}) {
        const int i = race == Race::Black ? 0 : 1;
        p.lambda_total[i] =
            cfg.sessions_per_hour * cfg.race_activity_multiplier.of(race) * p.duration;
        win_probabilities(cfg, race, &p.p_win_a[i], &p.p_win_b[i]);
    }
    return p;
}

void truncate_to_budget(std::vector<std::pair<double, std::uint32_t>>& wins, std::uint64_t budget) {
    if (wins.size() <= budget) return;
    std::nth_element(wins.begin(), wins.begin() + static_cast<std::ptrdiff_t>(budget), wins.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    wins.resize(budget);
}

SimRun run_core(const PreparedSim& p, std::uint64_t seed) {
    Rng rng(seed);
    SimRun run;
    run.region_names = p.region_names;
    run.region_race = p.region_race;
    run.duration_hours = p.duration;

    // Custom-audience matching and travel status are user-level facts.
    std::vector<SimUser> users;
    users.reserve(p.member_region.size());
    for (std::uint32_t i = 0; i < p.member_region.size(); ++i) {
        if (p.match_rate <= 0.0) continue;
        if (p.match_rate < 1.0 && rng.uniform01() >= p.match_rate) continue;
        SimUser u;
        u.member_index = i;
        u.activity_rate = p.sessions_per_hour;
        u.traveling = p.travel_prob > 0.0 && rng.uniform01() < p.travel_prob;
        users.push_back(u);
    }

    const double duration = p.duration;
    for (const SimUser& u : users) {
        const int race = p.member_race[u.member_index];
        const double p_a = p.p_win_a[race];
        const double p_ab = p_a + p.p_win_b[race];
        const std::uint64_t sessions = rng.poisson(p.lambda_total[race]);
        double first_a = -1.0, first_b = -1.0;
        for (std::uint64_t s = 0; s < sessions; ++s) {
            const double pick = rng.uniform01();
            if (pick < p_a) {
                const double t = rng.uniform01() * duration;
                if (first_a < 0.0 || t < first_a) first_a = t;
            } else if (pick < p_ab) {
                const double t = rng.uniform01() * duration;
                if (first_b < 0.0 || t < first_b) first_b = t;
            }
        }
        if (first_a < 0.0 && first_b < 0.0) continue;
        const std::uint32_t region = u.traveling ? p.out_region : p.member_region[u.member_index];
        if (first_a >= 0.0) run.wins_a.emplace_back(first_a, region);
        if (first_b >= 0.0) run.wins_b.emplace_back(first_b, region);
    }

    truncate_to_budget(run.wins_a, p.budget);
    truncate_to_budget(run.wins_b, p.budget);
    return run;
}

}  // namespace

SimRun simulate_run(const PairedExperiment& exp, const SimConfig& cfg, std::uint64_t seed) {
    return run_core(prepare(exp, cfg), seed);
}

DeliverySnapshot snapshot_at(const SimRun& run, bool campaign_a, const std::string& campaign_id,
                             double hour, bool terminal) {
    DeliverySnapshot snap;
    snap.campaign_id = campaign_id;
    snap.hour = hour;
    snap.terminal = terminal;
    const auto& wins = campaign_a ? run.wins_a : run.wins_b;
    std::vector<std::uint64_t> counts(run.region_names.size(), 0);
    for (const auto& [t, region] : wins) {
        if (t <= hour) counts[region]++;
    }
    for (std::size_t r = 0; r < counts.size(); ++r) {
        if (counts[r] > 0) snap.unique_impressions_by_region[run.region_names[r]] = counts[r];
    }
    snap.total_reach = snap.region_sum();
    return snap;
}

DeliveryOutcome simulate_delivery(const PairedExperiment& exp, const SimConfig& cfg) {
    const SimRun run = simulate_run(exp, cfg, cfg.seed);
    DeliveryOutcome out;
    for (std::uint32_t h = 1; h <= run.duration_hours; ++h) {
        const bool terminal = h == run.duration_hours;
        out.campaign_a.push_back(
            snapshot_at(run, true, exp.campaign_a.campaign_id, h, terminal));
        out.campaign_b.push_back(
            snapshot_at(run, false, exp.campaign_b.campaign_id, h, terminal));
    }
    return out;
}

ExpectedOutcome expected_outcome(const SimConfig& cfg, double n_black, double n_white,
                                 double duration_hours) {
    cfg.validate();
    const double keep = cfg.match_rate * (1.0 - cfg.travel_prob);
    double q_a[2], q_b[2];
    for (Race race : {Race::Black, Race::White}) {
        const int i = race == Race::Black ? 0 : 1;
        double p_a, p_b;
        win_probabilities(cfg, race, &p_a, &p_b);
        const double lam =
            cfg.sessions_per_hour * cfg.race_activity_multiplier.of(race) * duration_hours;
        q_a[i] = keep * (1.0 - std::exp(-lam * p_a));
        q_b[i] = keep * (1.0 - std::exp(-lam * p_b));
    }
    ExpectedOutcome e;
    e.expected_n_f = n_black * q_a[0] + n_white * q_a[1];
    e.expected_n_p = n_black * q_b[0] + n_white * q_b[1];
    if (e.expected_n_f > 0.0) e.s_f_b = n_black * q_a[0] / e.expected_n_f;
    if (e.expected_n_p > 0.0) e.s_p_b = n_black * q_b[0] / e.expected_n_p;
    e.d = e.s_f_b - e.s_p_b;
    return e;
}

double solve_bias_for_target_d(const SimConfig& cfg, double n_black, double n_white,
                               double duration_hours, double target_d) {
    if (target_d < 0.0) throw ConfigError("target effect must be nonnegative");
    if (target_d == 0.0) return 0.0;

    SimConfig probe = cfg;
    auto d_at = [&](double beta) {
        probe.bias_beta = beta;
        return expected_outcome(probe, n_black, n_white, duration_hours).d;
    };
    double hi = 20.0;  // relevance boosts beyond this are already saturated
    if (d_at(hi) < target_d) {
        throw ConfigError("target effect exceeds the delivery model's ceiling");
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2.0;
        if (d_at(mid) < target_d) lo = mid;
        else hi = mid;
    }
    return (lo + hi) / 2.0;
}

namespace {

TrialStats trial_from_run(const SimRun& run, std::uint64_t trial, double alpha) {
    stats::RaceBreakdown f, p;
    auto tally = [&](const std::vector<std::pair<double, std::uint32_t>>& wins,
                     stats::RaceBreakdown& out) {
        for (const auto& [t, region] : wins) {
            (void)t;
            switch (run.region_race[region]) {
                case Race::Black: out.n_black++; break;
                case Race::White: out.n_white++; break;
                default: out.discarded++;
            }
        }
    };
    tally(run.wins_a, f);
    tally(run.wins_b, p);

    TrialStats s;
    s.trial = trial;
    s.n_f_b = f.n_black;
    s.n_f_w = f.n_white;
    s.n_p_b = p.n_black;
    s.n_p_w = p.n_white;
    s.discarded_f = f.discarded;
    s.discarded_p = p.discarded;
    try {
        const auto r = stats::skew_test(f, p, alpha);
        s.d = r.d;
        s.z = r.z;
        s.p = r.p_value;
        s.reject = r.significant;
    } catch (const StatsError&) {
        s.degenerate = true;  // counted as a non-rejection
    }
    return s;
}

}  // namespace

std::vector<TrialStats> run_trials(const PairedExperiment& exp, const SimConfig& cfg,
                                   std::uint64_t trials, double alpha, unsigned threads) {
    if (trials == 0) throw ValidationError("run_trials: need at least one trial");
    const PreparedSim prepared = prepare(exp, cfg);

    std::vector<TrialStats> results(trials);
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));

    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= trials) break;
            const SimRun run = run_core(prepared, Rng::derive(cfg.seed, i));
            results[i] = trial_from_run(run, i, alpha);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return results;
}

void write_trials_csv(const std::vector<TrialStats>& rows, const std::string& path) {
    csv::Writer w(path);
    w.row({"trial", "n_f_b", "n_f_w", "n_p_b", "n_p_w", "D", "Z", "reject"});
    char d_buf[32], z_buf[32];
    for (const auto& r : rows) {
        std::snprintf(d_buf, sizeof(d_buf), "%.6f", r.d);
        std::snprintf(z_buf, sizeof(z_buf), "%.4f", r.z);
        w.row({std::to_string(r.trial), std::to_string(r.n_f_b), std::to_string(r.n_f_w),
               std::to_string(r.n_p_b), std::to_string(r.n_p_w), d_buf, z_buf,
               r.reject ? "1" : "0"});
    }
    w.close();
}

experiment::PairedExperiment make_synthetic_experiment(std::uint64_t per_race_size) {
    auto partition = std::make_shared<audience::AudiencePartition>();
    partition->name = "sim-cal";
    partition->black_group = {"sim-black", {"sim-dma-black"}};
    partition->white_group = {"sim-white", {"sim-dma-white"}};
    partition->per_race_size = per_race_size;
    partition->members.reserve(2 * per_race_size);
    for (std::uint64_t i = 0; i < per_race_size; ++i) {
        partition->members.push_back(audience::Member{
            "cal-b-" + std::to_string(i), "cal-b-" + std::to_string(i), "sim-dma-black",
            Race::Black});
    }
    for (std::uint64_t i = 0; i < per_race_size; ++i) {
        partition->members.push_back(audience::Member{
            "cal-w-" + std::to_string(i), "cal-w-" + std::to_string(i), "sim-dma-white",
            Race::White});
    }

    experiment::PairedExperiment exp;
    exp.experiment_id = "sim-cal";
    auto make_campaign = [&](const std::string& id, const std::string& school) {
        experiment::CampaignSpec c;
        c.campaign_id = id;
        c.creative.school_name = school;
        c.creative.kind = experiment::CreativeKind::Neutral;
        c.creative.headline = "Enroll in an online degree program at " + school;
        c.creative.image_id = "campus-" + school;
        c.creative.destination_url = "https://example.edu/" + school;
        c.audience = partition;
        return c;
    };
    exp.campaign_a = make_campaign("sim-cal-skewed", "calibration-skewed");
    exp.campaign_b = make_campaign("sim-cal-public", "calibration-public");
    return exp;
}

PowerReport calibrate_power(double target_d, std::uint64_t per_race_size, const SimConfig& cfg,
                            std::uint64_t trials, double alpha, unsigned threads) {
    if (trials < 100) throw ValidationError("calibrate_power: need at least 100 trials");
    if (per_race_size == 0) throw ValidationError("calibrate_power: empty audience");

    const auto exp = make_synthetic_experiment(per_race_size);
    const double n = static_cast<double>(per_race_size);

    SimConfig tuned = cfg;
    tuned.bias_beta =
        solve_bias_for_target_d(cfg, n, n, exp.campaign_a.duration_hours, target_d);

    PowerReport report;
    report.bias_beta = tuned.bias_beta;
    report.trials = trials;
    report.expected = expected_outcome(tuned, n, n, exp.campaign_a.duration_hours);

    const auto results = run_trials(exp, tuned, trials, alpha, threads);
    std::uint64_t rejects = 0;
    double sum_d = 0.0, sum_nf = 0.0, sum_np = 0.0;
    for (const auto& r : results) {
        if (r.reject) ++rejects;
        sum_d += r.d;
        sum_nf += static_cast<double>(r.n_f_b + r.n_f_w);
        sum_np += static_cast<double>(r.n_p_b + r.n_p_w);
    }
    const double t = static_cast<double>(trials);
    report.power = static_cast<double>(rejects) / t;
    report.mean_d = sum_d / t;
    report.mean_n_f = sum_nf / t;
    report.mean_n_p = sum_np / t;
    return report;
}

}  // namespace adaudit::sim
