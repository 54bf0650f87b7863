#include "tomsim/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tomsim/errors.hpp"

namespace tomsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path Hungarian solve (potentials form), 1-indexed
// internally. Requires rows <= cols. Returns the matched column per row.
std::vector<std::size_t> hungarian(const CostMatrix& a) {
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> row_of_col(m + 1, 0);  // 0 = unmatched
    std::vector<std::size_t> way(m + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        row_of_col[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = row_of_col[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a.at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (row_of_col[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> col_of_row(n, 0);
    for (std::size_t j = 1; j <= m; ++j)
        if (row_of_col[j] != 0) col_of_row[row_of_col[j] - 1] = j - 1;
    return col_of_row;
}

double total_of(const CostMatrix& a, const std::vector<std::size_t>& col_of_row) {
    double total = 0.0;
    for (std::size_t r = 0; r < col_of_row.size(); ++r) total += a.at(r, col_of_row[r]);
    return total;
}

// Optimal value of the subproblem over rows [first_row, rows) and the columns
// not yet taken. Returns 0 for an empty row range.
double optimal_tail(const CostMatrix& a, std::size_t first_row,
                    const std::vector<std::size_t>& free_cols) {
    const std::size_t n = a.rows() - first_row;
    if (n == 0) return 0.0;
    CostMatrix sub(n, free_cols.size());
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < free_cols.size(); ++c)
            sub.at(r, c) = a.at(first_row + r, free_cols[c]);
    const std::vector<std::size_t> sol = hungarian(sub);
    return total_of(sub, sol);
}

}  // namespace

Assignment min_cost_assignment(const CostMatrix& cost) {
    const std::size_t n = cost.rows();
    const std::size_t m = cost.cols();
    if (n > m)
        throw ShapeError("assignment needs rows <= cols, got " + std::to_string(n) + " x " +
                         std::to_string(m));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < m; ++c)
            if (!std::isfinite(cost.at(r, c)))
                throw ShapeError("assignment costs must be finite");

    Assignment result;
    result.col_of_row.reserve(n);
    if (n == 0) return result;

    std::vector<std::size_t> free_cols(m);
    for (std::size_t c = 0; c < m; ++c) free_cols[c] = c;

    // Fix rows in order to the smallest column that preserves optimality.
    double target = optimal_tail(cost, 0, free_cols);
    for (std::size_t r = 0; r < n; ++r) {
        const double tol = 1e-9 * std::max(1.0, std::fabs(target));
        bool fixed = false;
        for (std::size_t k = 0; k < free_cols.size() && !fixed; ++k) {
            const std::size_t c = free_cols[k];
            std::vector<std::size_t> rest = free_cols;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
            const double tail = optimal_tail(cost, r + 1, rest);
            if (cost.at(r, c) + tail <= target + tol) {
                result.col_of_row.push_back(c);
                free_cols = std::move(rest);
                target = tail;
                fixed = true;
            }
        }
        if (!fixed) {
            // Floating-point drift kept every candidate above target; fall back
            // to the plain solve for the remaining rows.
            CostMatrix sub(n - r, free_cols.size());
            for (std::size_t rr = 0; rr + r < n; ++rr)
                for (std::size_t c = 0; c < free_cols.size(); ++c)
                    sub.at(rr, c) = cost.at(r + rr, free_cols[c]);
            for (std::size_t local : hungarian(sub))
                result.col_of_row.push_back(free_cols[local]);
            break;
        }
    }

    result.total_cost = total_of(cost, result.col_of_row);
    return result;
}

}  // namespace tomsim
