#include "adaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaudit/errors.hpp"

namespace adaudit::stats {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;
}  // namespace

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw StatsError("normal_quantile: p must be in (0,1)");

    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley refinement against the erfc-backed CDF. Skipped in the far
    // tails where exp(x^2/2) overflows; Acklam alone is ~1e-9 there.
    if (std::fabs(x) < 37.0) {
        const double e = normal_cdf(x) - p;
        const double u = e * kSqrt2Pi * std::exp(x * x / 2.0);
        x = x - u / (1.0 + x * u / 2.0);
    }
    return x;
}

double table_critical_z(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw StatsError("alpha must be in (0,1)");
    const double exact = normal_quantile(1.0 - alpha);
    return std::floor(exact * 100.0) / 100.0;
}

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double confidence) {
    if (n == 0) throw StatsError("wilson_interval: n must be positive");
    const double z = normal_quantile(0.5 + confidence / 2.0);
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {center - half, center + half};
}

RaceBreakdown infer_race(const std::map<std::string, std::uint64_t>& by_region,
                         const std::set<std::string>& black_regions,
                         const std::set<std::string>& white_regions) {
    RaceBreakdown out;
    for (const auto& [region, count] : by_region) {
        const bool in_black = black_regions.count(region) > 0;
        const bool in_white = white_regions.count(region) > 0;
        if (in_black && in_white) {
            throw IntegrityError("region in both race groups: " + region);
        }
        if (in_black) out.n_black += count;
        else if (in_white) out.n_white += count;
        else out.discarded += count;
    }
    return out;
}

SkewResult skew_test(const RaceBreakdown& for_profit, const RaceBreakdown& public_ad,
                     double alpha) {
    SkewResult r;
    r.n_f = for_profit.inferable();
    r.n_p = public_ad.inferable();
    if (r.n_f == 0 || r.n_p == 0) {
        throw StatsError("skew_test undefined: a side has zero inferable impressions");
    }
    const double nf = static_cast<double>(r.n_f);
    const double np = static_cast<double>(r.n_p);
    r.s_f_b = static_cast<double>(for_profit.n_black) / nf;
    r.s_p_b = static_cast<double>(public_ad.n_black) / np;
    r.d = r.s_f_b - r.s_p_b;
    r.pooled_s = static_cast<double>(for_profit.n_black + public_ad.n_black) / (nf + np);
    if (r.pooled_s <= 0.0 || r.pooled_s >= 1.0) {
        throw StatsError("skew_test degenerate: pooled fraction is 0 or 1");
    }
    r.se = std::sqrt(r.pooled_s * (1.0 - r.pooled_s) * (1.0 / nf + 1.0 / np));
    r.z = r.d / r.se;
    r.p_value = 1.0 - normal_cdf(r.z);
    r.z_critical = table_critical_z(alpha);
    r.significant = r.z > r.z_critical;
    r.ci_f = wilson_interval(for_profit.n_black, r.n_f);
    r.ci_p = wilson_interval(public_ad.n_black, r.n_p);
    return r;
}

HolmDecision holm_correct(const std::vector<double>& p_values, double alpha) {
    for (double p : p_values) {
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p-value outside [0,1]");
    }
    const std::size_t m = p_values.size();
    HolmDecision d;
    d.order.resize(m);
    std::iota(d.order.begin(), d.order.end(), std::size_t{0});
    std::stable_sort(d.order.begin(), d.order.end(),
                     [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });
    d.sorted_p.reserve(m);
    d.thresholds.reserve(m);
    d.reject_sorted.assign(m, false);
    d.reject.assign(m, false);
    bool alive = true;
    for (std::size_t k = 0; k < m; ++k) {
        const double p = p_values[d.order[k]];
        const double threshold = alpha / static_cast<double>(m - k);
        d.sorted_p.push_back(p);
        d.thresholds.push_back(threshold);
        if (alive && p <= threshold) {
            d.reject_sorted[k] = true;
            d.reject[d.order[k]] = true;
        } else {
            alive = false;
        }
    }
    return d;
}

double analytic_power(double d, double pooled_s, double n_f, double n_p, double alpha) {
    if (n_f <= 0.0 || n_p <= 0.0) throw StatsError("analytic_power: sample sizes must be positive");
    const double se = std::sqrt(pooled_s * (1.0 - pooled_s) * (1.0 / n_f + 1.0 / n_p));
    return normal_cdf(d / se - table_critical_z(alpha));
}

std::uint64_t min_sample_size(double alpha, double power, double s1, double s2) {
    if (!(s1 > 0.0 && s1 < 1.0 && s2 > 0.0 && s2 < 1.0)) {
        throw StatsError("min_sample_size: fractions must be in (0,1)");
    }
    if (s1 == s2) throw StatsError("min_sample_size: no finite n when s1 == s2");
    if (!(power > 0.0 && power < 1.0)) throw StatsError("min_sample_size: power must be in (0,1)");

    const double d = std::abs(s1 - s2);
    const double pooled = (s1 + s2) / 2.0;
    const double needed = table_critical_z(alpha) + normal_quantile(power);
    if (needed <= 0.0) return 1;  // target at or below the test's size

    double n = 2.0 * pooled * (1.0 - pooled) * (needed / d) * (needed / d);
    std::uint64_t candidate = static_cast<std::uint64_t>(std::ceil(n));
    if (candidate < 1) candidate = 1;
    // Settle float rounding at the integer boundary.
    while (candidate > 1 &&
           analytic_power(d, pooled, static_cast<double>(candidate - 1),
                          static_cast<double>(candidate - 1), alpha) >= power) {
        --candidate;
    }
    while (analytic_power(d, pooled, static_cast<double>(candidate),
                          static_cast<double>(candidate), alpha) < power) {
        ++candidate;
    }
    return candidate;
}

}  // namespace adaudit::stats
