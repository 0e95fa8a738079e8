#include "seastitch/assignment.hpp"

#include <algorithm>
#include <cmath>

namespace seastitch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_costs(const CostMatrix& m) {
    for (double c : m.costs) {
        if (!std::isfinite(c) || c < 0.0) {
            throw std::invalid_argument("cost matrix entries must be finite and non-negative");
        }
    }
}

// Kuhn-Munkres with row/column potentials (the classic O(n^2 m) formulation).
// Requires n <= m; cost(i, j) is 0-indexed. Returns the column of each row.
template <typename CostFn>
std::vector<int> kuhn_munkres(int n, int m, CostFn cost) {
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(m) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(m) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(m) + 1, kInf);
        std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> col_of_row(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= m; ++j) {
        if (p[j] != 0) col_of_row[static_cast<std::size_t>(p[j]) - 1] = j - 1;
    }
    return col_of_row;
}

// Deterministic tie resolution: applies cost-preserving swaps until the
// row-sorted pair list is a lexicographic local minimum. Only exact cost ties
// move, so the objective value is untouched.
template <typename CostFn, typename FeasibleFn>
void canonicalize(Matching& out, int rows, int cols, CostFn cost, FeasibleFn feasible) {
    std::sort(out.pairs.begin(), out.pairs.end());
    std::vector<char> row_used(static_cast<std::size_t>(rows), 0);
    std::vector<char> col_used(static_cast<std::size_t>(cols), 0);
    for (const auto& [r, c] : out.pairs) {
        row_used[static_cast<std::size_t>(r)] = 1;
        col_used[static_cast<std::size_t>(c)] = 1;
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t a = 0; a < out.pairs.size(); ++a) {
            auto& [ra, ca] = out.pairs[a];
            // Exchange columns between two pairs when the swapped total ties.
            for (std::size_t b = a + 1; b < out.pairs.size(); ++b) {
                auto& [rb, cb] = out.pairs[b];
                if (cb < ca && feasible(ra, cb) && feasible(rb, ca) &&
                    cost(ra, cb) + cost(rb, ca) == cost(ra, ca) + cost(rb, cb)) {
                    std::swap(ca, cb);
                    changed = true;
                }
            }
            // Move the match to an earlier unmatched row at equal cost.
            for (int r = 0; r < ra; ++r) {
                if (!row_used[static_cast<std::size_t>(r)] && feasible(r, ca) &&
                    cost(r, ca) == cost(ra, ca)) {
                    row_used[static_cast<std::size_t>(ra)] = 0;
                    row_used[static_cast<std::size_t>(r)] = 1;
                    ra = r;
                    changed = true;
                    break;
                }
            }
            // Move the match to an earlier unmatched column at equal cost.
            for (int c = 0; c < ca; ++c) {
                if (!col_used[static_cast<std::size_t>(c)] && feasible(ra, c) &&
                    cost(ra, c) == cost(ra, ca)) {
                    col_used[static_cast<std::size_t>(ca)] = 0;
                    col_used[static_cast<std::size_t>(c)] = 1;
                    ca = c;
                    changed = true;
                    break;
                }
            }
        }
        if (changed) std::sort(out.pairs.begin(), out.pairs.end());
    }
}

void fill_unmatched_and_cost(Matching& out, const CostMatrix& m) {
    std::vector<char> row_used(static_cast<std::size_t>(m.rows), 0);
    std::vector<char> col_used(static_cast<std::size_t>(m.cols), 0);
    out.total_cost = 0.0;
    for (const auto& [r, c] : out.pairs) {
        row_used[static_cast<std::size_t>(r)] = 1;
        col_used[static_cast<std::size_t>(c)] = 1;
        out.total_cost += m.at(r, c);
    }
    out.unmatched_rows.clear();
    out.unmatched_cols.clear();
    for (int r = 0; r < m.rows; ++r) {
        if (!row_used[static_cast<std::size_t>(r)]) out.unmatched_rows.push_back(r);
    }
    for (int c = 0; c < m.cols; ++c) {
        if (!col_used[static_cast<std::size_t>(c)]) out.unmatched_cols.push_back(c);
    }
}

}  // namespace

Matching solve_min_cost(const CostMatrix& m) {
    if (m.empty()) {
        throw std::invalid_argument("solve_min_cost: empty cost matrix");
    }
    validate_costs(m);
    Matching out;
    if (m.rows <= m.cols) {
        const auto col = kuhn_munkres(m.rows, m.cols, [&](int r, int c) { return m.at(r, c); });
        for (int r = 0; r < m.rows; ++r) out.pairs.emplace_back(r, col[static_cast<std::size_t>(r)]);
    } else {
        const auto row = kuhn_munkres(m.cols, m.rows, [&](int c, int r) { return m.at(r, c); });
        for (int c = 0; c < m.cols; ++c) out.pairs.emplace_back(row[static_cast<std::size_t>(c)], c);
    }
    canonicalize(
        out, m.rows, m.cols, [&](int r, int c) { return m.at(r, c); },
        [](int, int) { return true; });
    fill_unmatched_and_cost(out, m);
    return out;
}

Matching solve_gated(const CostMatrix& m) {
    if (!(m.gate > 0.0)) {
        throw std::invalid_argument("solve_gated: gate must be positive");
    }
    validate_costs(m);
    Matching out;
    if (m.rows == 0 || m.cols == 0) {
        fill_unmatched_and_cost(out, m);
        return out;
    }

    // Padded square problem: rows 0..R-1 real, R..n-1 virtual; same for
    // columns. Real/virtual diagonal entries cost `pad` model "stay
    // unmatched"; virtual/virtual is free; everything else is forbidden.
    const int R = m.rows;
    const int C = m.cols;
    const int n = R + C;
    double max_feasible_sum = 0.0;
    for (double c : m.costs) {
        if (c <= m.gate) max_feasible_sum += c;
    }
    const double pad = std::isinf(m.gate) ? max_feasible_sum + 1.0 : m.gate;
    const double big = static_cast<double>(n) * pad + max_feasible_sum + 1.0;

    const auto padded = [&](int r, int c) -> double {
        if (r < R && c < C) {
            const double v = m.at(r, c);
            return v <= m.gate ? v : big;
        }
        if (r < R) return (c - C == r) ? pad : big;
        if (c < C) return (r - R == c) ? pad : big;
        return 0.0;
    };
    const auto col = kuhn_munkres(n, n, padded);
    for (int r = 0; r < R; ++r) {
        const int c = col[static_cast<std::size_t>(r)];
        if (c < C && m.at(r, c) <= m.gate) out.pairs.emplace_back(r, c);
    }
    canonicalize(
        out, R, C, [&](int r, int c) { return m.at(r, c); },
        [&](int r, int c) { return m.at(r, c) <= m.gate; });
    fill_unmatched_and_cost(out, m);
    return out;
}

}  // namespace seastitch
