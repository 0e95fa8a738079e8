// Minimum-cost bipartite assignment with optional distance gating.
#pragma once

#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace seastitch {

struct CostMatrix {
    int rows{0};
    int cols{0};
    std::vector<double> costs;  // row-major, rows*cols entries
    double gate{std::numeric_limits<double>::infinity()};

    CostMatrix() = default;
    CostMatrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), costs(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& at(int r, int c) { return costs[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return costs[static_cast<std::size_t>(r) * cols + c]; }
    bool empty() const { return rows == 0 || cols == 0; }
};

struct Matching {
    std::vector<std::pair<int, int>> pairs;  // sorted by row
    std::vector<int> unmatched_rows;
    std::vector<int> unmatched_cols;
    double total_cost{0.0};  // sum over matched pairs only
};

/// Optimal full assignment: matches min(rows, cols) pairs with minimum total
/// cost. The gate field is ignored. Throws std::invalid_argument on an empty
/// matrix or non-finite/negative costs.
Matching solve_min_cost(const CostMatrix& m);

/// Gated assignment: pairs with cost > gate are forbidden and any row/column
/// may stay unmatched. Realized by padding with virtual unmatched nodes at
/// cost = gate, i.e. minimizes sum(pair costs) + gate * (#unmatched rows +
/// #unmatched cols). An empty matrix yields an all-unmatched result.
Matching solve_gated(const CostMatrix& m);

}  // namespace seastitch
