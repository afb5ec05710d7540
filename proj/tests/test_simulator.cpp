#include <doctest.h>

#include <cmath>
#include <set>

#include "adaudit/errors.hpp"
#include "adaudit/rng.hpp"
#include "adaudit/simulator.hpp"
#include "adaudit/stats.hpp"

using namespace adaudit;
using experiment::PairedExperiment;
using sim::SimConfig;

namespace {

// High-reach regime: expected sessions over 24h is 3*ln(2) and win
// probability is 1/3, putting per-ad reach probability at exactly 1/2.
// Handy for closed-form checks; the default config's low-reach regime is
// what calibrated testing uses.
SimConfig base_config(std::uint64_t seed = 1) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.sessions_per_hour = 3.0 * std::log(2.0) / 24.0;
    cfg.base_relevance = 0.0;
    return cfg;
}

SimConfig default_config(std::uint64_t seed) {
    SimConfig cfg;
    cfg.seed = seed;
    return cfg;
}

PairedExperiment synth(std::uint64_t per_race) {
    return sim::make_synthetic_experiment(per_race);
}

std::string serialize(const std::vector<experiment::DeliverySnapshot>& series) {
    std::string out;
    for (const auto& s : series) {
        out += s.campaign_id + "@" + std::to_string(s.hour) + ":";
        for (const auto& [r, c] : s.unique_impressions_by_region) {
            out += r + "=" + std::to_string(c) + ";";
        }
        out += s.terminal ? "T" : "t";
        out += "|";
    }
    return out;
}

}  // namespace

TEST_CASE("simulate_delivery is deterministic in the seed") {
    const auto exp = synth(400);
    const auto cfg = base_config(123);
    const auto out1 = sim::simulate_delivery(exp, cfg);
    const auto out2 = sim::simulate_delivery(exp, cfg);
    CHECK(serialize(out1.campaign_a) == serialize(out2.campaign_a));
    CHECK(serialize(out1.campaign_b) == serialize(out2.campaign_b));

    auto cfg2 = cfg;
    cfg2.seed = 124;
    const auto out3 = sim::simulate_delivery(exp, cfg2);
    CHECK(serialize(out1.campaign_a) != serialize(out3.campaign_a));
}

TEST_CASE("simulate_delivery validation") {
    SUBCASE("empty audience") {
        auto exp = synth(10);
        auto empty = std::make_shared<audience::AudiencePartition>(*exp.campaign_a.audience);
        empty->members.clear();
        exp.campaign_a.audience = empty;
        exp.campaign_b.audience = empty;
        CHECK_THROWS_AS(sim::simulate_delivery(exp, base_config()), ValidationError);
    }
    SUBCASE("campaigns must share the partition") {
        auto exp = synth(10);
        auto other = synth(10);
        other.campaign_b.audience =
            std::make_shared<audience::AudiencePartition>(*exp.campaign_b.audience);
        const_cast<audience::AudiencePartition*>(other.campaign_b.audience.get())->name = "other";
        exp.campaign_b = other.campaign_b;
        CHECK_THROWS_AS(sim::simulate_delivery(exp, base_config()), ValidationError);
    }
    SUBCASE("match_rate zero is a valid all-zero run") {
        auto cfg = base_config();
        cfg.match_rate = 0.0;
        const auto out = sim::simulate_delivery(synth(50), cfg);
        for (const auto& s : out.campaign_a) CHECK(s.total_reach == 0);
    }
}

TEST_CASE("hourly series is cumulative and terminal covers the full run") {
    const auto out = sim::simulate_delivery(synth(500), base_config(9));
    REQUIRE(out.campaign_a.size() == 24);
    CHECK(out.campaign_a.back().terminal);
    std::uint64_t prev = 0;
    for (const auto& s : out.campaign_a) {
        CHECK(s.total_reach >= prev);
        prev = s.total_reach;
    }
    CHECK(out.campaign_a.back().total_reach == out.campaign_a.back().region_sum());
}

TEST_CASE("expected_outcome reference values") {
    auto cfg = base_config();
    cfg.bias_beta = 0.8;
    const auto e = sim::expected_outcome(cfg, 1000, 1000, 24.0);
    CHECK(e.s_f_b == doctest::Approx(0.5710116519).epsilon(1e-9));
    CHECK(e.s_p_b == doctest::Approx(0.4373591822).epsilon(1e-9));
    CHECK(e.d == doctest::Approx(0.1336524697).epsilon(1e-8));

    SUBCASE("beta = 0 is exactly symmetric in the model") {
        cfg.bias_beta = 0.0;
        cfg.race_activity_multiplier = {0.6, 1.0};
        cfg.competing_pressure = {0.5, 0.2};
        cfg.match_rate = 0.9;
        cfg.travel_prob = 0.05;
        const auto null_e = sim::expected_outcome(cfg, 1000, 1000, 24.0);
        CHECK(null_e.s_f_b == doctest::Approx(null_e.s_p_b).epsilon(1e-14));
        CHECK(null_e.d == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("solve_bias_for_target_d inverts the model") {
    const auto cfg = base_config();
    for (double target : {0.02, 0.05, 0.08, 0.13}) {
        const double beta = sim::solve_bias_for_target_d(cfg, 1500, 1500, 24.0, target);
        auto probe = cfg;
        probe.bias_beta = beta;
        CHECK(sim::expected_outcome(probe, 1500, 1500, 24.0).d ==
              doctest::Approx(target).epsilon(1e-9));
    }
    CHECK(sim::solve_bias_for_target_d(cfg, 1500, 1500, 24.0, 0.0) == 0.0);
    CHECK_THROWS_AS(sim::solve_bias_for_target_d(cfg, 1500, 1500, 24.0, 0.9), ConfigError);
}

TEST_CASE("null platform: mean D is centered on zero") {
    const auto exp = synth(1000);
    const auto results = sim::run_trials(exp, base_config(314), 2000, 0.05);
    double sum_d = 0.0;
    int positive = 0;
    for (const auto& r : results) {
        sum_d += r.d;
        positive += r.d > 0 ? 1 : 0;
    }
    const double mean_d = sum_d / static_cast<double>(results.size());
    CHECK(std::fabs(mean_d) <= 0.01);
    // exchangeability: the sign of D is a fair coin
    CHECK(std::fabs(positive / 2000.0 - 0.5) < 0.04);
}

TEST_CASE("confounders move both ads' fractions together") {
    auto cfg = base_config(2718);
    cfg.race_activity_multiplier = {0.6, 1.0};  // fewer Black users online
    cfg.competing_pressure = {0.4, 0.1};        // and they cost more to reach
    const auto exp = synth(1500);
    const auto results = sim::run_trials(exp, cfg, 400, 0.05);
    double sf = 0.0, sp = 0.0;
    for (const auto& r : results) {
        sf += static_cast<double>(r.n_f_b) / static_cast<double>(r.n_f_b + r.n_f_w);
        sp += static_cast<double>(r.n_p_b) / static_cast<double>(r.n_p_b + r.n_p_w);
    }
    sf /= 400.0;
    sp /= 400.0;
    CHECK(sf < 0.45);                       // both shifted well below one half
    CHECK(sp < 0.45);
    CHECK(std::fabs(sf - sp) < 0.005);      // but shifted together
}

TEST_CASE("large bias saturates the skewed ad's win rate") {
    auto cfg = base_config(555);
    cfg.bias_beta = 5.0;
    cfg.travel_prob = 0.0;
    const auto exp = synth(800);
    const auto expect = sim::expected_outcome(cfg, 800, 800, 24.0);
    const auto results = sim::run_trials(exp, cfg, 50, 0.05);
    for (const auto& r : results) {
        CHECK(r.d > 0.0);
        const double sfb = static_cast<double>(r.n_f_b) / static_cast<double>(r.n_f_b + r.n_f_w);
        CHECK(sfb == doctest::Approx(expect.s_f_b).epsilon(0.08));
    }
}

TEST_CASE("label swap under the null mirrors the outcome exactly") {
    auto exp = synth(600);
    const auto cfg = base_config(777);
    const auto run1 = sim::simulate_run(exp, cfg, cfg.seed);

    auto swapped = exp;
    std::swap(swapped.campaign_a, swapped.campaign_b);
    const auto run2 = sim::simulate_run(swapped, cfg, cfg.seed);

    // beta = 0: both slots have identical win probabilities, so the same
    // stream produces the same per-slot outcomes regardless of labels.
    CHECK(run1.wins_a == run2.wins_a);
    CHECK(run1.wins_b == run2.wins_b);
}

TEST_CASE("flip invariance: relabeled regions leave D's distribution alone") {
    const auto exp = synth(800);

    auto flipped_exp = exp;
    auto flipped = std::make_shared<audience::AudiencePartition>(*exp.campaign_a.audience);
    std::swap(flipped->black_group, flipped->white_group);
    for (auto& m : flipped->members) {
        m.region = m.race == voter::Race::Black ? "sim-dma-white" : "sim-dma-black";
    }
    std::swap(flipped->black_group.group_id, flipped->white_group.group_id);
    flipped->black_group.dma_names = {"sim-dma-white"};
    flipped->white_group.dma_names = {"sim-dma-black"};
    flipped->flipped = true;
    flipped_exp.campaign_a.audience = flipped;
    flipped_exp.campaign_b.audience = flipped;

    auto cfg = base_config(31);
    cfg.bias_beta = 0.3;
    const auto r1 = sim::run_trials(exp, cfg, 800, 0.05);
    auto cfg2 = cfg;
    cfg2.seed = 32;
    const auto r2 = sim::run_trials(flipped_exp, cfg2, 800, 0.05);

    auto rate = [](const std::vector<sim::TrialStats>& rs) {
        int rej = 0;
        for (const auto& r : rs) rej += r.reject ? 1 : 0;
        return static_cast<double>(rej) / static_cast<double>(rs.size());
    };
    auto mean_d = [](const std::vector<sim::TrialStats>& rs) {
        double s = 0.0;
        for (const auto& r : rs) s += r.d;
        return s / static_cast<double>(rs.size());
    };
    CHECK(std::fabs(rate(r1) - rate(r2)) <= 0.05);
    CHECK(std::fabs(mean_d(r1) - mean_d(r2)) <= 0.006);
}

TEST_CASE("impressions budget caps unique reach with earliest wins kept") {
    const auto exp = synth(500);
    auto cfg = base_config(88);
    const auto unbudgeted = sim::simulate_run(exp, cfg, cfg.seed);
    REQUIRE(unbudgeted.wins_a.size() > 120);

    cfg.impressions_budget_per_ad = 120;
    const auto capped = sim::simulate_run(exp, cfg, cfg.seed);
    CHECK(capped.wins_a.size() == 120);
    CHECK(capped.wins_b.size() == 120);

    // the capped set is exactly the 120 earliest first-wins of the free run
    auto sorted = unbudgeted.wins_a;
    std::sort(sorted.begin(), sorted.end());
    sorted.resize(120);
    auto capped_sorted = capped.wins_a;
    std::sort(capped_sorted.begin(), capped_sorted.end());
    CHECK(sorted == capped_sorted);

    const auto out = sim::simulate_delivery(exp, cfg);
    CHECK(out.campaign_a.back().total_reach == 120);
}

TEST_CASE("travelers are attributed outside the audience groups") {
    auto cfg = base_config(64);
    cfg.travel_prob = 1.0;
    const auto out = sim::simulate_delivery(synth(200), cfg);
    const auto& term = out.campaign_a.back();
    REQUIRE(term.total_reach > 0);
    REQUIRE(term.unique_impressions_by_region.size() == 1);
    CHECK(term.unique_impressions_by_region.count(sim::kOutOfGroupRegion) == 1);

    const auto breakdown = stats::infer_race(term.unique_impressions_by_region,
                                             {"sim-dma-black"}, {"sim-dma-white"});
    CHECK(breakdown.n_black == 0);
    CHECK(breakdown.n_white == 0);
    CHECK(breakdown.discarded == term.total_reach);
}

TEST_CASE("calibrate_power") {
    SUBCASE("rejects thin trial counts") {
        CHECK_THROWS_AS(sim::calibrate_power(0.05, 100, default_config(1), 99), ValidationError);
    }
    SUBCASE("type I rate sits near alpha under the null") {
        const auto report = sim::calibrate_power(0.0, 3000, default_config(46), 1000);
        CHECK(report.bias_beta == 0.0);
        CHECK(report.power > 0.03);
        CHECK(report.power < 0.075);
    }
    SUBCASE("detection power tracks the analytic value") {
        const auto report = sim::calibrate_power(0.05, 8000, default_config(47), 600);
        const auto& e = report.expected;
        const double analytic =
            stats::analytic_power(e.d, (e.s_f_b * e.expected_n_f + e.s_p_b * e.expected_n_p) /
                                           (e.expected_n_f + e.expected_n_p),
                                  e.expected_n_f, e.expected_n_p);
        CHECK(std::fabs(report.power - analytic) <= 0.05);
        CHECK(report.mean_n_f == doctest::Approx(e.expected_n_f).epsilon(0.05));
        CHECK(report.mean_d == doctest::Approx(0.05).epsilon(0.15));
    }
    SUBCASE("power is nondecreasing in the audience size") {
        double last = -1.0;
        for (std::uint64_t n : {500u, 1500u, 5000u}) {
            const auto report = sim::calibrate_power(0.05, n, default_config(48), 400);
            CHECK(report.power > last);
            last = report.power;
        }
        CHECK(last > 0.35);  // at 5,000 per race the effect is usually visible
    }
}

TEST_CASE("trial csv uses the documented columns") {
    const auto exp = synth(100);
    const auto rows = sim::run_trials(exp, base_config(5), 3, 0.05);
    const auto path = (std::filesystem::temp_directory_path() / "adaudit_trials.csv").string();
    sim::write_trials_csv(rows, path);
    const auto t = csv::read_file(path);
    CHECK(t.header == std::vector<std::string>{"trial", "n_f_b", "n_f_w", "n_p_b", "n_p_w", "D",
                                               "Z", "reject"});
    CHECK(t.rows.size() == 3);
    std::remove(path.c_str());
}

TEST_CASE("sim config json round trip and validation") {
    auto cfg = base_config(9);
    cfg.bias_beta = 0.4;
    cfg.race_activity_multiplier = {0.7, 1.1};
    cfg.competing_pressure = {0.2, 0.0};
    cfg.match_rate = 0.93;
    cfg.travel_prob = 0.02;
    cfg.impressions_budget_per_ad = 5000;
    const auto j = cfg.to_json();
    const auto back = sim::SimConfig::from_json(j);
    CHECK(back.bias_beta == cfg.bias_beta);
    CHECK(back.race_activity_multiplier.black == cfg.race_activity_multiplier.black);
    CHECK(back.match_rate == cfg.match_rate);
    CHECK(back.impressions_budget_per_ad == cfg.impressions_budget_per_ad);
    CHECK(back.seed == cfg.seed);

    auto bad = cfg;
    bad.match_rate = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.race_activity_multiplier.black = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.impressions_budget_per_ad = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
