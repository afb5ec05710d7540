#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace adaudit::stats {

// ---------------------------------------------------------------------------
// Normal distribution helpers
// ---------------------------------------------------------------------------

// Standard normal CDF. Backed by std::erfc, which is accurate to a few ulp;
// comfortably inside the 1e-7 absolute error budget on [-6, 6].
double normal_cdf(double x);

// Inverse standard normal CDF (Acklam's rational approximation plus one
// Halley refinement). p in (0, 1).
double normal_quantile(double p);

// One-sided critical value at level alpha, using the two-decimal Z-table
// convention of the methodology: the exact quantile rounded down to two
// decimals. At alpha = 0.05 this is 1.64.
double table_critical_z(double alpha);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval for k successes out of n at the given confidence
// level. Stable near 0 and 1, which binomial fractions here get close to.
Interval wilson_interval(std::uint64_t k, std::uint64_t n, double confidence = 0.95);

// ---------------------------------------------------------------------------
// Skew statistics
// ---------------------------------------------------------------------------

// Race counts recovered from one campaign's terminal delivery report.
// Impressions in regions outside the partition's groups cannot be mapped to
// a race and are kept only as a discard tally.
struct RaceBreakdown {
    std::uint64_t n_black = 0;
    std::uint64_t n_white = 0;
    std::uint64_t discarded = 0;

    std::uint64_t inferable() const { return n_black + n_white; }
    std::uint64_t total() const { return n_black + n_white + discarded; }
};

// Classify per-region unique-impression counts into Black/White/discarded
// using the partition's region groups. A region present in both groups is an
// upstream invariant breach and raises IntegrityError.
RaceBreakdown infer_race(const std::map<std::string, std::uint64_t>& by_region,
                         const std::set<std::string>& black_regions,
                         const std::set<std::string>& white_regions);

struct SkewResult {
    std::uint64_t n_f = 0;  // for-profit ad: inferable unique impressions
    std::uint64_t n_p = 0;  // public ad
    double s_f_b = 0.0;     // Black fraction among for-profit ad recipients
    double s_p_b = 0.0;     // Black fraction among public ad recipients
    double d = 0.0;         // s_f_b - s_p_b
    double pooled_s = 0.0;  // Black fraction over both ads' recipients
    double se = 0.0;
    double z = 0.0;
    double p_value = 1.0;
    double z_critical = 0.0;
    bool significant = false;
    Interval ci_f;  // 95% interval around s_f_b
    Interval ci_p;
};

// One-sided two-proportion z-test of H0: D = 0 against H1: D > 0, where
// D = s_f_b - s_p_b and SE pools both ads' recipients.
SkewResult skew_test(const RaceBreakdown& for_profit, const RaceBreakdown& public_ad,
                     double alpha = 0.05);

// ---------------------------------------------------------------------------
// Multiple-test correction
// ---------------------------------------------------------------------------

struct HolmDecision {
    std::vector<std::size_t> order;    // input indices sorted by ascending p
    std::vector<double> sorted_p;      // p-values in that order
    std::vector<double> thresholds;    // alpha / (m - k + 1) for k = 1..m
    std::vector<bool> reject_sorted;   // step-down decisions, prefix of order
    std::vector<bool> reject;          // decisions mapped back to input order
};

// Holm's step-down procedure: reject while p_(k) <= alpha/(m-k+1), stop at
// the first failure.
HolmDecision holm_correct(const std::vector<double>& p_values, double alpha = 0.05);

// ---------------------------------------------------------------------------
// Power analysis
// ---------------------------------------------------------------------------

// Analytic power of the one-sided test for a true difference d, pooled base
// fraction, and per-ad sample sizes: Phi(d/SE - z_critical).
double analytic_power(double d, double pooled_s, double n_f, double n_p, double alpha = 0.05);

// Smallest per-ad n whose analytic power reaches the target for true
// fractions s1 vs s2. Degenerate power targets can return n = 1 (any sample
// suffices when the target is at or below the test's size). s1 == s2 has no
// finite answer and raises StatsError.
std::uint64_t min_sample_size(double alpha, double power, double s1, double s2);

}  // namespace adaudit::stats
