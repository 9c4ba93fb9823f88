#include <doctest.h>

#include <set>

#include "lczmap/error.hpp"
#include "lczmap/rng.hpp"
#include "lczmap/spatial.hpp"
#include "oracles.hpp"

using namespace lcz;

namespace {

LabelMap random_map(int w, int h, int classes, std::uint64_t seed) {
    LabelMap m(w, h);
    Rng rng(seed);
    for (auto& v : m.labels) v = static_cast<std::uint8_t>(rng.next_index(classes));
    return m;
}

} // namespace

TEST_CASE("majority_vote fixed points and forced majorities") {
    SUBCASE("uniform map is unchanged") {
        LabelMap m(17, 13);
        for (auto& v : m.labels) v = 4;
        LabelMap out = majority_vote(m, 11);
        CHECK(out.labels == m.labels);
    }

    SUBCASE("single deviant pixel in a 21x21 field is replaced") {
        LabelMap m(21, 21);
        for (auto& v : m.labels) v = 2;
        m.at(10, 10) = 9;
        LabelMap out = majority_vote(m, 11);
        for (auto v : out.labels) CHECK(v == 2);
    }

    SUBCASE("kernel 1 is the identity") {
        LabelMap m = random_map(40, 30, 14, 5);
        CHECK(majority_vote(m, 1).labels == m.labels);
    }

    SUBCASE("even kernels are rejected") {
        LabelMap m(5, 5);
        CHECK_THROWS_AS(majority_vote(m, 4), Error);
        CHECK_THROWS_AS(majority_vote(m, 0), Error);
    }
}

TEST_CASE("majority_vote matches the naive histogram oracle") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        LabelMap m = random_map(200, 200, 14, 1000 + seed);
        LabelMap fast = majority_vote(m, 11);
        LabelMap naive = oracle::majority_vote_naive(m, 11);
        REQUIRE(fast.labels == naive.labels);
    }
    // small maps exercise repeated reflection
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        LabelMap m = random_map(7, 4, 5, 2000 + seed);
        CHECK(majority_vote(m, 11).labels == oracle::majority_vote_naive(m, 11).labels);
        CHECK(majority_vote(m, 5).labels == oracle::majority_vote_naive(m, 5).labels);
    }
}

TEST_CASE("majority_vote output classes are a subset of the input's") {
    LabelMap m = random_map(64, 64, 3, 77); // classes 0..2 only
    LabelMap out = majority_vote(m, 11);
    std::set<int> present(out.labels.begin(), out.labels.end());
    for (int c : present) CHECK(c <= 2);
    CHECK(out.width == m.width);
    CHECK(out.height == m.height);
}

TEST_CASE("interior pixels of large uniform regions are fixed points") {
    LabelMap m(60, 60);
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 60; ++j) m.at(i, j) = (j < 30) ? 1 : 8;
    LabelMap out = majority_vote(m, 11);
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 60; ++j)
            if (j < 24 || j > 35) CHECK(out.at(i, j) == m.at(i, j));
}

TEST_CASE("aggregate_to_lcz block majorities") {
    SUBCASE("10x10 uniform block collapses to one cell") {
        LabelMap m(10, 10);
        for (auto& v : m.labels) v = 6;
        LabelMap out = aggregate_to_lcz(m, 10);
        REQUIRE(out.width == 1);
        REQUIRE(out.height == 1);
        CHECK(out.at(0, 0) == 6);
    }

    SUBCASE("four uniform quadrants give a 2x2 map") {
        LabelMap m(20, 20);
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j) m.at(i, j) = static_cast<std::uint8_t>((i / 10) * 2 + (j / 10));
        LabelMap out = aggregate_to_lcz(m, 10);
        REQUIRE(out.width == 2);
        REQUIRE(out.height == 2);
        CHECK(out.at(0, 0) == 0);
        CHECK(out.at(0, 1) == 1);
        CHECK(out.at(1, 0) == 2);
        CHECK(out.at(1, 1) == 3);
    }

    SUBCASE("random 37x23 map with partial edge blocks matches the oracle") {
        LabelMap m = random_map(37, 23, 14, 31);
        LabelMap out = aggregate_to_lcz(m, 10);
        REQUIRE(out.width == 4);
        REQUIRE(out.height == 3);
        CHECK(out.labels == oracle::aggregate_naive(m, 10).labels);
    }

    SUBCASE("map smaller than the block is rejected") {
        LabelMap m(5, 5);
        CHECK_THROWS_AS(aggregate_to_lcz(m, 10), Error);
    }
}
