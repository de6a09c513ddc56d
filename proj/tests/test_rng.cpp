#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "paf/rng.hpp"

using paf::Rng;
using paf::derive_seed;

TEST_CASE("same seed reproduces the stream") {
    Rng a(123), b(123);
    for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("derived seeds differ across words and bases") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t base : {0ULL, 1ULL, 42ULL})
        for (std::uint64_t word = 0; word < 100; ++word) seen.insert(derive_seed(base, word));
    CHECK(seen.size() == 300);
}

TEST_CASE("below stays in range and covers values") {
    Rng rng(7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = rng.below(13);
        CHECK(v < 13);
        seen.insert(v);
    }
    CHECK(seen.size() == 13);
}

TEST_CASE("next_double lies in [0, 1)") {
    Rng rng(9);
    for (int i = 0; i < 10000; ++i) {
        const double d = rng.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
    }
}

TEST_CASE("binomial edge cases") {
    Rng rng(1);
    CHECK(rng.binomial(10, 0.0) == 0);
    CHECK(rng.binomial(10, 1.0) == 10);
    CHECK(rng.binomial(0, 0.3) == 0);
}

TEST_CASE("binomial matches mean and variance") {
    Rng rng(17);
    const int n = 50;
    const double p = 0.2;
    const int draws = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const auto x = static_cast<double>(rng.binomial(n, p));
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / draws;
    const double var = sumsq / draws - mean * mean;
    CHECK(mean == doctest::Approx(n * p).epsilon(0.01));
    CHECK(var == doctest::Approx(n * p * (1 - p)).epsilon(0.05));
}

TEST_CASE("binomial survives large n with tiny keep probability") {
    Rng rng(3);
    // (1-p)^n underflows double here; the log-space walk must still work.
    const auto x = rng.binomial(100000, 0.5);
    CHECK(x > 48000);
    CHECK(x < 52000);
}

TEST_CASE("sample_without_replacement yields distinct sorted values") {
    Rng rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        const auto v = rng.sample_without_replacement(57, 12);
        CHECK(v.size() == 12);
        for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i - 1] < v[i]);
        CHECK(v.front() >= 0);
        CHECK(v.back() < 57);
    }
    const auto all = rng.sample_without_replacement(9, 9);
    CHECK(all.size() == 9);
    CHECK(all.front() == 0);
    CHECK(all.back() == 8);
}

TEST_CASE("shuffle is a permutation") {
    Rng rng(11);
    std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
    rng.shuffle(v);
    std::set<int> s(v.begin(), v.end());
    CHECK(s.size() == 8);
}
