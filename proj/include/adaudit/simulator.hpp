#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "adaudit/experiment.hpp"

#include <nlohmann/json.hpp>

namespace adaudit::sim {

// Synthetic region name for impressions attributed outside the audience's
// groups (travelers). Downstream race inference discards these.
inline const std::string kOutOfGroupRegion = "out-of-group";

// Per-race knob pair; race Other never enters an audience.
struct RacePair {
    double black = 1.0;
    double white = 1.0;

    double of(voter::Race r) const { return r == voter::Race::Black ? black : white; }
};

// Delivery-model parameters. bias_beta = 0 is the null platform: every other
// knob hits both paired ads identically, which is exactly the confounder
// structure the paired design is supposed to cancel.
struct SimConfig {
    double bias_beta = 0.0;               // relevance boost, skewed ad x Black users
    RacePair race_activity_multiplier{1.0, 1.0};
    RacePair competing_pressure{0.0, 0.0};  // external bids depressing win odds
    double match_rate = 1.0;              // custom-audience match fraction
    double travel_prob = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t impressions_budget_per_ad = std::numeric_limits<std::uint64_t>::max();
    double sessions_per_hour = 0.0866;    // base user activity rate, ~2 sessions/day
    // Default win rate of ~1/21 per session keeps per-ad reach to a few
    // percent of the audience. The z-test assumes samples small relative to
    // the audience; reach near the audience size makes it conservative.
    double base_relevance = -3.7;

    void validate() const;
    nlohmann::json to_json() const;
    static SimConfig from_json(const nlohmann::json& j);
};

// A platform user in one simulated run.
struct SimUser {
    std::uint32_t member_index = 0;  // into the partition's member list
    double activity_rate = 0.0;      // sessions per hour before race multiplier
    bool traveling = false;
};

// Raw result of one simulated run: per ad, each reached user's first-win
// time and attributed region, already budget-truncated.
struct SimRun {
    std::vector<std::string> region_names;         // member regions + out-of-group
    std::vector<voter::Race> region_race;          // Other marks the discard region
    std::vector<std::pair<double, std::uint32_t>> wins_a;  // (hour, region index)
    std::vector<std::pair<double, std::uint32_t>> wins_b;
    std::uint32_t duration_hours = 0;
};

// Run the delivery model once with an explicit seed. Both campaigns must
// share the partition; an empty audience is an error, match_rate = 0 is a
// valid all-zero run.
SimRun simulate_run(const experiment::PairedExperiment& exp, const SimConfig& cfg,
                    std::uint64_t seed);

// Cumulative unique impressions by region at a simulated hour mark.
experiment::DeliverySnapshot snapshot_at(const SimRun& run, bool campaign_a,
                                         const std::string& campaign_id, double hour,
                                         bool terminal);

struct DeliveryOutcome {
    std::vector<experiment::DeliverySnapshot> campaign_a;  // hours 1..duration
    std::vector<experiment::DeliverySnapshot> campaign_b;
};

// Hourly snapshot series for both campaigns; deterministic in cfg.seed.
DeliveryOutcome simulate_delivery(const experiment::PairedExperiment& exp, const SimConfig& cfg);

// Analytic reach model under an unbinding impressions budget. Poisson
// session counts make per-user reach events independent across ads, so the
// inferable counts are binomial with these parameters.
struct ExpectedOutcome {
    double s_f_b = 0.0;       // expected Black fraction, skewed ad
    double s_p_b = 0.0;       // expected Black fraction, public ad
    double d = 0.0;
    double expected_n_f = 0.0;  // expected inferable uniques per ad
    double expected_n_p = 0.0;
};

ExpectedOutcome expected_outcome(const SimConfig& cfg, double n_black, double n_white,
                                 double duration_hours);

// Invert the expected-outcome model for the bias_beta that yields a target
// true D > 0. Throws ConfigError if the target exceeds the model's ceiling.
double solve_bias_for_target_d(const SimConfig& cfg, double n_black, double n_white,
                               double duration_hours, double target_d);

struct TrialStats {
    std::uint64_t trial = 0;
    std::uint64_t n_f_b = 0, n_f_w = 0, n_p_b = 0, n_p_w = 0;
    std::uint64_t discarded_f = 0, discarded_p = 0;
    double d = 0.0;
    double z = 0.0;
    double p = 1.0;
    bool reject = false;
    bool degenerate = false;  // test undefined on this trial's counts
};

// Monte Carlo over seeded replications of one experiment. Trial i uses the
// stream derived from (cfg.seed, i); trials run in parallel and the result
// order is by trial index regardless of scheduling.
std::vector<TrialStats> run_trials(const experiment::PairedExperiment& exp, const SimConfig& cfg,
                                   std::uint64_t trials, double alpha = 0.05,
                                   unsigned threads = 0);

void write_trials_csv(const std::vector<TrialStats>& rows, const std::string& path);

struct PowerReport {
    double power = 0.0;          // fraction of trials rejecting H0
    double bias_beta = 0.0;      // solved for the target effect
    double mean_d = 0.0;
    double mean_n_f = 0.0;
    double mean_n_p = 0.0;
    std::uint64_t trials = 0;
    ExpectedOutcome expected;
};

// Empirical power of the audit against a synthetic equal-split audience of
// per_race_size per race, with bias_beta solved so the true effect is
// target_d. trials must be at least 100.
PowerReport calibrate_power(double target_d, std::uint64_t per_race_size, const SimConfig& cfg,
                            std::uint64_t trials, double alpha = 0.05, unsigned threads = 0);

// The synthetic experiment calibrate_power runs; exposed so callers can run
// their own trial loops against the same setup.
experiment::PairedExperiment make_synthetic_experiment(std::uint64_t per_race_size);

}  // namespace adaudit::sim
