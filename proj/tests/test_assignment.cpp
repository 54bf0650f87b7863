#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "tomsim/assignment.hpp"
#include "tomsim/errors.hpp"

using namespace tomsim;
using testsupport::TestRng;

namespace {

CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    CostMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
    return m;
}

}  // namespace

TEST_CASE("two by two picks the cheap diagonal") {
    const Assignment a = min_cost_assignment(from_rows({{1.0, 10.0}, {10.0, 1.0}}));
    CHECK(a.col_of_row == std::vector<std::size_t>{0, 1});
    CHECK(a.total_cost == 2.0);
}

TEST_CASE("two by two picks the cheap anti-diagonal") {
    const Assignment a = min_cost_assignment(from_rows({{10.0, 1.0}, {1.0, 10.0}}));
    CHECK(a.col_of_row == std::vector<std::size_t>{1, 0});
    CHECK(a.total_cost == 2.0);
}

TEST_CASE("rectangular problems leave expensive columns unmatched") {
    const Assignment a = min_cost_assignment(from_rows({{5.0, 1.0, 9.0}}));
    CHECK(a.col_of_row == std::vector<std::size_t>{1});
    CHECK(a.total_cost == 1.0);
}

TEST_CASE("empty problems cost nothing") {
    const Assignment a = min_cost_assignment(CostMatrix(0, 0));
    CHECK(a.col_of_row.empty());
    CHECK(a.total_cost == 0.0);
    const Assignment b = min_cost_assignment(CostMatrix(0, 3));
    CHECK(b.col_of_row.empty());
    CHECK(b.total_cost == 0.0);
}

TEST_CASE("more rows than columns is rejected") {
    CHECK_THROWS_AS(min_cost_assignment(CostMatrix(3, 2)), ShapeError);
    CHECK_THROWS_AS(min_cost_assignment(CostMatrix(1, 0)), ShapeError);
}

TEST_CASE("non-finite costs are rejected") {
    CostMatrix inf(2, 2);
    inf.at(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(min_cost_assignment(inf), ShapeError);
    CostMatrix nan(1, 2);
    nan.at(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(min_cost_assignment(nan), ShapeError);
}

TEST_CASE("cost-equal optima resolve to the lexicographically smallest columns") {
    // every matching of an all-equal matrix costs the same
    CostMatrix flat(3, 4);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 4; ++c) flat.at(r, c) = 2.5;
    const Assignment a = min_cost_assignment(flat);
    CHECK(a.col_of_row == std::vector<std::size_t>{0, 1, 2});
    CHECK(a.total_cost == 7.5);

    // two optima: (0,1) and (1,0) both cost 4; (0,1) is smaller
    const Assignment b = min_cost_assignment(from_rows({{1.0, 3.0}, {3.0, 1.0}}));
    CHECK(b.col_of_row == std::vector<std::size_t>{0, 1});

    // crafted tie where row 0 must take the larger entry to stay optimal
    const Assignment c = min_cost_assignment(from_rows({{0.0, 1.0}, {0.0, 5.0}}));
    CHECK(c.col_of_row == std::vector<std::size_t>{1, 0});
    CHECK(c.total_cost == 1.0);
}

TEST_CASE("random instances match exhaustive enumeration exactly") {
    TestRng rng(71);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t rows = rng.below(6) + 1;
        const std::size_t cols = rows + rng.below(3);
        std::vector<std::vector<double>> data(rows, std::vector<double>(cols));
        CostMatrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                data[r][c] = rng.uniform(0.0, 20.0);
                m.at(r, c) = data[r][c];
            }
        const Assignment got = min_cost_assignment(m);
        const auto want = testsupport::brute_force_assignment(data);
        REQUIRE(got.col_of_row == want.columns);
        REQUIRE(got.total_cost == want.cost);
        // reported total is the row-order sum of the chosen entries
        double rebuilt = 0.0;
        for (std::size_t r = 0; r < rows; ++r) rebuilt += data[r][got.col_of_row[r]];
        CHECK(got.total_cost == rebuilt);
    }
}

TEST_CASE("ties in random integer-valued instances still pick the smallest columns") {
    TestRng rng(73);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = rng.below(5) + 1;
        const std::size_t cols = rows + rng.below(2);
        std::vector<std::vector<double>> data(rows, std::vector<double>(cols));
        CostMatrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                data[r][c] = static_cast<double>(rng.below(4));  // heavy ties
                m.at(r, c) = data[r][c];
            }
        const Assignment got = min_cost_assignment(m);
        const auto want = testsupport::brute_force_assignment(data);
        REQUIRE(got.col_of_row == want.columns);
        REQUIRE(got.total_cost == want.cost);
    }
}

TEST_CASE("solver is deterministic") {
    TestRng rng(79);
    CostMatrix m(5, 7);
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 7; ++c) m.at(r, c) = rng.uniform(0.0, 9.0);
    const Assignment a = min_cost_assignment(m);
    const Assignment b = min_cost_assignment(m);
    CHECK(a.col_of_row == b.col_of_row);
    CHECK(a.total_cost == b.total_cost);
}
