#include <algorithm>
#include <random>

#include "doctest.h"
#include "twic/pairing.hpp"

using namespace twic;

TEST_CASE("assignment agrees with brute force and breaks ties lexicographically") {
    std::mt19937_64 rng(20240311);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 4);
        std::vector<std::vector<Rational>> w(static_cast<size_t>(n),
                                             std::vector<Rational>(static_cast<size_t>(n)));
        for (auto& row : w)
            for (auto& x : row) x = Rational(static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 3));

        const auto got = max_weight_assignment(w);

        std::vector<int> perm(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
        Rational best(-1000000);
        std::vector<int> best_perm;
        do {
            Rational total(0);
            for (int i = 0; i < n; ++i) total = total + w[static_cast<size_t>(i)][static_cast<size_t>(perm[static_cast<size_t>(i)])];
            if (total > best || (total == best && perm < best_perm)) {
                best = total;
                best_perm = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        Rational got_total(0);
        for (int i = 0; i < n; ++i) got_total = got_total + w[static_cast<size_t>(i)][static_cast<size_t>(got[static_cast<size_t>(i)])];
        REQUIRE(got_total == best);
        REQUIRE(got == best_perm);
    }
}

TEST_CASE("single-pair net gain reproduces the running example") {
    const auto result = pair_subchannels({{2, 1}}, {{1, 1}}, Rational(1, 2));
    CHECK(result.total_net_gain == Rational(1, 2));
    CHECK(result.pairs[0].backward_index == 0);
}

TEST_CASE("moderate forwards have nothing to gain") {
    const auto result = pair_subchannels({{3, 2}, {2, 2}}, {{1, 1}, {4, 4}}, Rational(1, 2));
    CHECK(result.total_net_gain == Rational(0));
}

TEST_CASE("two-pair instance picks the profitable match") {
    // The strong-interference forward channel must grab the weak backward one;
    // checked against both permutations by hand.
    const auto result = pair_subchannels({{1, 3}, {3, 2}}, {{4, 4}, {1, 1}}, Rational(1, 2));
    CHECK(result.pairs[0].backward_index == 1);
    CHECK(result.pairs[1].backward_index == 0);
    CHECK(result.total_net_gain == Rational(1, 2));
}

TEST_CASE("input validation") {
    CHECK_THROWS(pair_subchannels({}, {}, Rational(1, 2)));
    CHECK_THROWS(pair_subchannels({{1, 1}}, {{1, 1}, {2, 2}}, Rational(1, 2)));
}
