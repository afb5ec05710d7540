#include <doctest.h>

#include <cmath>
#include <set>

#include "adaudit/rng.hpp"

using adaudit::Rng;

TEST_CASE("same seed gives the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng c(42), d(43);
    bool differ = false;
    for (int i = 0; i < 10 && !differ; ++i) differ = c.next_u64() != d.next_u64();
    CHECK(differ);
}

TEST_CASE("derive decorrelates streams") {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t t = 0; t < 1000; ++t) seeds.insert(Rng::derive(7, t));
    CHECK(seeds.size() == 1000);
    CHECK(Rng::derive(7, 3) == Rng::derive(7, 3));
    CHECK(Rng::derive(7, 3) != Rng::derive(8, 3));
}

TEST_CASE("below stays in range and covers it") {
    Rng rng(1);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = rng.below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("poisson sample moments") {
    Rng rng(99);
    for (double mean : {0.3, 2.1, 45.0}) {
        const int n = 20000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = static_cast<double>(rng.poisson(mean));
            sum += v;
            sum2 += v * v;
        }
        const double m = sum / n;
        const double var = sum2 / n - m * m;
        CHECK(std::fabs(m - mean) < 0.06 * std::max(1.0, mean));
        CHECK(std::fabs(var - mean) < 0.12 * std::max(1.0, mean));
    }
    CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("sample_without_replacement is a prefix-uniform draw") {
    Rng rng(5);
    std::vector<int> pool{1, 2, 3, 4, 5, 6, 7, 8};
    const auto sample = rng.sample_without_replacement(pool, 5);
    CHECK(sample.size() == 5);
    std::set<int> uniq(sample.begin(), sample.end());
    CHECK(uniq.size() == 5);
    for (int v : sample) CHECK((v >= 1 && v <= 8));

    Rng r1(9), r2(9);
    CHECK(r1.sample_without_replacement(pool, 4) == r2.sample_without_replacement(pool, 4));
}
