#ifndef TOMSIM_ASSIGNMENT_HPP
#define TOMSIM_ASSIGNMENT_HPP

#include <cstddef>
#include <vector>

namespace tomsim {

// Dense row-major cost matrix for rectangular assignment problems.
class CostMatrix {
public:
    CostMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

struct Assignment {
    // col_of_row[r] is the column matched to row r; every row is matched.
    std::vector<std::size_t> col_of_row;
    // Sum of the chosen entries, accumulated in row order.
    double total_cost = 0.0;
};

// Exact minimum-cost assignment of every row to a distinct column, for
// rows <= cols (throws ShapeError otherwise). Costs must be finite.
//
// Among cost-equal optima the result is the lexicographically smallest by
// (column of row 0, column of row 1, ...): the optimal value is found with a
// shortest-augmenting-path Hungarian solve, then each row's column is fixed to
// the smallest index that keeps the remaining subproblem optimal.
Assignment min_cost_assignment(const CostMatrix& cost);

}  // namespace tomsim

#endif
