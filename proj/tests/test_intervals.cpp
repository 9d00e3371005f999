#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "lbd/intervals.hpp"

using namespace lbd;

namespace {
std::set<std::pair<std::int64_t, std::int64_t>> as_set(const std::vector<ClosedInterval>& v) {
    std::set<std::pair<std::int64_t, std::int64_t>> out;
    for (const auto& iv : v) out.insert({iv.lo, iv.hi});
    return out;
}
}  // namespace

TEST_CASE("worked example", "[intervals]") {
    const auto s = minimal_and_disjoint({{1, 5}, {2, 3}, {6, 8}});
    CHECK(as_set(s.minimal) == std::set<std::pair<std::int64_t, std::int64_t>>{{2, 3}, {6, 8}});
    CHECK(as_set(s.disjoint) == std::set<std::pair<std::int64_t, std::int64_t>>{{2, 3}, {6, 8}});
    CHECK(s.lower_bound == 2);
}

TEST_CASE("empty input", "[intervals]") {
    const auto s = minimal_and_disjoint({});
    CHECK(s.minimal.empty());
    CHECK(s.disjoint.empty());
    CHECK(s.lower_bound == 0);
}

TEST_CASE("duplicates collapse in the outputs", "[intervals]") {
    const auto s = minimal_and_disjoint({{1, 2}, {1, 2}});
    REQUIRE(s.minimal.size() == 1);
    CHECK(s.minimal[0] == ClosedInterval{1, 2});
    CHECK(s.lower_bound == 1);
}

TEST_CASE("nested chain keeps only the innermost interval", "[intervals]") {
    const auto s = minimal_and_disjoint({{1, 10}, {2, 9}, {3, 8}});
    REQUIRE(s.minimal.size() == 1);
    CHECK(s.minimal[0] == ClosedInterval{3, 8});
    CHECK(s.lower_bound == 1);
    CHECK(oracle_minimal({{1, 10}, {2, 9}, {3, 8}}).size() == 1);
    CHECK(oracle_max_disjoint({{1, 10}, {2, 9}, {3, 8}}) == 1);
}

TEST_CASE("touching intervals are not disjoint", "[intervals]") {
    const auto s = minimal_and_disjoint({{1, 3}, {3, 5}});
    CHECK(s.lower_bound == 1);
    CHECK(oracle_max_disjoint({{1, 3}, {3, 5}}) == 1);
    const auto apart = minimal_and_disjoint({{1, 3}, {4, 5}});
    CHECK(apart.lower_bound == 2);
}

TEST_CASE("singleton collection", "[intervals]") {
    const auto s = minimal_and_disjoint({{4, 4}});
    CHECK(s.minimal.size() == 1);
    CHECK(s.lower_bound == 1);
    CHECK(oracle_minimal({{4, 4}}).size() == 1);
    CHECK(oracle_max_disjoint({{4, 4}}) == 1);
}

TEST_CASE("invalid interval is rejected", "[intervals]") {
    CHECK_THROWS_AS(minimal_and_disjoint({{5, 4}}), invalid_argument_error);
    CHECK_THROWS_AS(oracle_minimal({{5, 4}}), invalid_argument_error);
    CHECK_THROWS_AS(oracle_max_disjoint({{5, 4}}), invalid_argument_error);
}

TEST_CASE("random collections agree with the oracles", "[intervals]") {
    std::mt19937 gen(4242);
    std::uniform_int_distribution<int> n_dist(0, 50);
    std::uniform_int_distribution<std::int64_t> e_dist(0, 40);
    for (int rep = 0; rep < 2000; ++rep) {
        std::vector<ClosedInterval> c(static_cast<std::size_t>(n_dist(gen)));
        for (auto& iv : c) {
            const std::int64_t a = e_dist(gen), b = e_dist(gen);
            iv = {std::min(a, b), std::max(a, b)};
        }
        const auto s = minimal_and_disjoint(c);
        REQUIRE(as_set(s.minimal) == as_set(oracle_minimal(c)));
        REQUIRE(s.lower_bound == oracle_max_disjoint(c));
        // intervals in D are pairwise disjoint and minimal
        for (std::size_t i = 0; i + 1 < s.disjoint.size(); ++i)
            REQUIRE(s.disjoint[i].hi < s.disjoint[i + 1].lo);
        const auto minimal_set = as_set(s.minimal);
        for (const auto& iv : s.disjoint) REQUIRE(minimal_set.count({iv.lo, iv.hi}) == 1);
    }
}

TEST_CASE("idempotence and order invariance", "[intervals]") {
    std::mt19937 gen(777);
    std::uniform_int_distribution<std::int64_t> e_dist(0, 30);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<ClosedInterval> c(25);
        for (auto& iv : c) {
            const std::int64_t a = e_dist(gen), b = e_dist(gen);
            iv = {std::min(a, b), std::max(a, b)};
        }
        const auto s = minimal_and_disjoint(c);
        const auto again = minimal_and_disjoint(s.minimal);
        REQUIRE(as_set(again.minimal) == as_set(s.minimal));
        REQUIRE(again.lower_bound == s.lower_bound);

        auto shuffled = c;
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        const auto s2 = minimal_and_disjoint(shuffled);
        REQUIRE(as_set(s2.minimal) == as_set(s.minimal));
        REQUIRE(as_set(s2.disjoint) == as_set(s.disjoint));
    }
}
