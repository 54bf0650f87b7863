#ifndef TOMSIM_TESTS_ORACLES_HPP
#define TOMSIM_TESTS_ORACLES_HPP

// Reference implementations the tests compare the library against. Each is
// written from the mathematical definition, independently of the code under
// test, and favors exact integer or exhaustive computation over cleverness.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "tomsim/geometry.hpp"

namespace testsupport {

// Deterministic generator for test data. Raw engine output is scaled by hand
// so the values do not depend on libstdc++'s distribution internals.
struct TestRng {
    std::mt19937_64 engine;

    explicit TestRng(std::uint64_t seed) : engine(seed) {}

    double uniform() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t below(std::uint64_t n) { return engine() % n; }  // bias irrelevant for tests
};

// Line rasterization by per-station rounding, computed in exact integer
// arithmetic. For the dominant axis each integer station gets the rounded
// minor coordinate of the ideal segment between cell centers; ties round
// toward the travel direction (+y when x is dominant, since the canonical
// start is the row-major smaller endpoint; toward the x step direction when
// y is dominant). Equivalent to sampling the segment densely and keeping one
// cell per station.
inline std::vector<tomsim::GridCell> station_line(tomsim::GridCell a, tomsim::GridCell b) {
    const bool flipped = (b.y != a.y) ? (b.y < a.y) : (b.x < a.x);
    if (flipped) std::swap(a, b);

    const std::int64_t adx = std::abs(static_cast<std::int64_t>(b.x) - a.x);
    const std::int64_t ady = static_cast<std::int64_t>(b.y) - a.y;  // >= 0 by canonical order
    std::vector<tomsim::GridCell> cells;

    if (adx >= ady) {
        const std::int64_t sx = b.x >= a.x ? 1 : -1;
        for (std::int64_t i = 0; i <= adx; ++i) {
            std::int64_t y;
            if (adx == 0) {
                y = a.y;
            } else {
                const std::int64_t num = static_cast<std::int64_t>(a.y) * adx + i * ady;
                y = (2 * num + adx) / (2 * adx);  // round half toward +y
            }
            cells.push_back({static_cast<int>(a.x + i * sx), static_cast<int>(y)});
        }
    } else {
        const std::int64_t sx = b.x >= a.x ? 1 : -1;
        for (std::int64_t j = 0; j <= ady; ++j) {
            const std::int64_t num =
                static_cast<std::int64_t>(a.x) * ady + j * (static_cast<std::int64_t>(b.x) - a.x);
            std::int64_t x;
            if (sx > 0) {
                x = (2 * num + ady) / (2 * ady);  // round half toward +x
            } else {
                // round half toward -x: ceil(v - 1/2) with a nonnegative numerator
                x = (2 * num + ady - 1) / (2 * ady);
            }
            cells.push_back({static_cast<int>(x), static_cast<int>(a.y + j)});
        }
    }

    if (flipped) std::reverse(cells.begin(), cells.end());
    return cells;
}

// Sight test built on station_line: blocked iff a wall lies strictly between
// the endpoint cells.
inline bool station_line_of_sight(const tomsim::GridMap& grid, const tomsim::Vec3& from,
                                  const tomsim::Vec3& to) {
    const auto cells = station_line(grid.world_to_cell(from), grid.world_to_cell(to));
    for (std::size_t i = 1; i + 1 < cells.size(); ++i)
        if (grid.is_wall(cells[i])) return false;
    return true;
}

// Plain O(V^2) Dijkstra over the 8-connected free cells, tracking straight
// and diagonal step counts so the final cost is rebuilt the same way the
// library builds it. Returns nullopt when the goal is unreachable.
inline std::optional<double> dijkstra_cost(const tomsim::GridMap& grid, tomsim::GridCell start,
                                           tomsim::GridCell goal) {
    const int w = grid.width(), h = grid.height();
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    const auto idx = [w](tomsim::GridCell c) {
        return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(w) +
               static_cast<std::size_t>(c.x);
    };
    constexpr double kSqrt2 = 1.4142135623730951;
    const auto cost_of = [](std::int64_t s, std::int64_t d) {
        return static_cast<double>(s) + static_cast<double>(d) * kSqrt2;
    };

    std::vector<std::int64_t> straight(n, -1), diagonal(n, -1);
    std::vector<std::uint8_t> done(n, 0);
    straight[idx(start)] = 0;
    diagonal[idx(start)] = 0;

    for (;;) {
        std::size_t best = n;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i] || straight[i] < 0) continue;
            const double c = cost_of(straight[i], diagonal[i]);
            if (c < best_cost) {
                best_cost = c;
                best = i;
            }
        }
        if (best == n) break;
        done[best] = 1;
        const tomsim::GridCell here{static_cast<int>(best % static_cast<std::size_t>(w)),
                                    static_cast<int>(best / static_cast<std::size_t>(w))};
        static constexpr int ddx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
        static constexpr int ddy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
        for (int k = 0; k < 8; ++k) {
            const tomsim::GridCell next{here.x + ddx[k], here.y + ddy[k]};
            if (next.x < 0 || next.x >= w || next.y < 0 || next.y >= h) continue;
            if (grid.is_wall(next)) continue;
            const bool diag = ddx[k] != 0 && ddy[k] != 0;
            const std::int64_t ns = straight[best] + (diag ? 0 : 1);
            const std::int64_t nd = diagonal[best] + (diag ? 1 : 0);
            const std::size_t ni = idx(next);
            if (straight[ni] < 0 || cost_of(ns, nd) < cost_of(straight[ni], diagonal[ni])) {
                straight[ni] = ns;
                diagonal[ni] = nd;
            }
        }
    }

    if (straight[idx(goal)] < 0) return std::nullopt;
    return cost_of(straight[idx(goal)], diagonal[idx(goal)]);
}

struct BruteAssignment {
    double cost = 0.0;
    std::vector<std::size_t> columns;  // column per row; empty when rows == 0
};

// Exhaustive minimum-cost injection of rows into columns. Candidate columns
// are tried in ascending order and only strict improvements are kept, so the
// result is the lexicographically smallest optimum. Cost is summed in row
// order, matching how the library reports totals.
inline BruteAssignment brute_force_assignment(const std::vector<std::vector<double>>& cost) {
    const std::size_t rows = cost.size();
    const std::size_t cols = rows == 0 ? 0 : cost[0].size();
    BruteAssignment best;
    best.cost = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> current(rows, 0);
    std::vector<bool> used(cols, false);

    const auto total_in_row_order = [&](const std::vector<std::size_t>& cols_of) {
        double total = 0.0;
        for (std::size_t r = 0; r < rows; ++r) total += cost[r][cols_of[r]];
        return total;
    };

    const std::function<void(std::size_t)> recurse = [&](std::size_t r) {
        if (r == rows) {
            const double total = total_in_row_order(current);
            if (total < best.cost) {
                best.cost = total;
                best.columns = current;
            }
            return;
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (used[c]) continue;
            used[c] = true;
            current[r] = c;
            recurse(r + 1);
            used[c] = false;
        }
    };

    if (rows == 0) {
        best.cost = 0.0;
        return best;
    }
    recurse(0);
    return best;
}

// Uniform random wall layout with guaranteed-free start/goal style usage left
// to the caller.
inline tomsim::GridMap random_grid(TestRng& rng, int width, int height, double wall_fraction,
                                   double cell_size = 0.5) {
    tomsim::GridMap grid(width, height, cell_size, {0.0, 0.0});
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (rng.uniform() < wall_fraction) grid.set_wall({x, y}, true);
    return grid;
}

}  // namespace testsupport

#endif
