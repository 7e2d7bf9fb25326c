#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "simstudy/stats/rng.hpp"

using namespace simstudy::stats;

TEST_SUITE("rng") {
    TEST_CASE("Philox4x32-10 known-answer vectors") {
        CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
        CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
              PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
        CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
              PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
    }

    TEST_CASE("same seed, same stream; different seeds differ") {
        Rng a(123), b(123), c(124);
        bool any_diff = false;
        for (int i = 0; i < 1000; ++i) {
            const auto x = a.next_u64();
            CHECK(x == b.next_u64());
            any_diff |= x != c.next_u64();
        }
        CHECK(any_diff);
        Rng n1(5), n2(5);
        for (int i = 0; i < 101; ++i) CHECK(n1.normal() == n2.normal());
    }

    TEST_CASE("uniform stays in range and has the right mean") {
        Rng rng(1);
        double sum = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double u = rng.uniform();
            REQUIRE(u >= 0.0);
            REQUIRE(u < 1.0);
            const double v = rng.uniform_open();
            REQUIRE(v > 0.0);
            REQUIRE(v < 1.0);
            sum += u;
        }
        CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12.0 / n));
    }

    TEST_CASE("below is in range and roughly uniform") {
        Rng rng(2);
        CHECK(rng.below(1) == 0);
        std::vector<int> hist(7, 0);
        const int n = 70000;
        for (int i = 0; i < n; ++i) ++hist[rng.below(7)];
        double chi2 = 0;
        for (int h : hist) chi2 += (h - n / 7.0) * (h - n / 7.0) / (n / 7.0);
        CHECK(chi2 < 22.5);  // 6 df, p ≈ 0.001
    }

    TEST_CASE("normal draws have unit moments") {
        Rng rng(3);
        const int n = 100000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            const double z = rng.normal();
            s += z;
            s2 += z * z;
        }
        const double mean = s / n;
        CHECK(std::abs(mean) < 0.015);
        CHECK(std::abs(s2 / n - mean * mean - 1.0) < 0.02);
    }

    TEST_CASE("shuffle is a permutation and reproducible") {
        std::vector<int> a(50), b(50);
        std::iota(a.begin(), a.end(), 0);
        std::iota(b.begin(), b.end(), 0);
        Rng r1(4), r2(4);
        r1.shuffle(std::span<int>(a));
        r2.shuffle(std::span<int>(b));
        CHECK(a == b);
        auto sorted = a;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
        CHECK(!std::is_sorted(a.begin(), a.end()));
    }

    TEST_CASE("replication seeds are distinct per worker and across workers") {
        std::set<std::uint64_t> seen;
        for (std::uint64_t i = 0; i < 50000; ++i) seen.insert(replication_seed(9, "host-1", i));
        CHECK(seen.size() == 50000);
        for (std::uint64_t i = 0; i < 50000; ++i) seen.insert(replication_seed(9, "host-2", i));
        CHECK(seen.size() == 100000);
        CHECK(replication_seed(9, "a", 0) != replication_seed(10, "a", 0));
        CHECK(scheduler_seed(9, "a") != replication_seed(9, "a", 0));
        CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
        CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    }
}
