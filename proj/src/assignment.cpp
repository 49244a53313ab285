#include "plantdoctor/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plantdoctor/errors.hpp"

namespace plantdoctor {

namespace {

struct SquareProblem {
    std::size_t n = 0;
    std::vector<double> cost;  // n x n

    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return cost[r * n + c]; }
};

// Shortest-augmenting-path Hungarian method. Returns the row matched to each
// column and leaves dual potentials with cost - u - v >= 0, tight on matches.
struct HungarianResult {
    std::vector<std::size_t> row_of_col;
    std::vector<double> u;
    std::vector<double> v;
};

HungarianResult hungarian(const SquareProblem& pb) {
    const std::size_t n = pb.n;
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based with index 0 as the virtual source.
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0);
    std::vector<std::size_t> way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = pb.at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
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
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    HungarianResult res;
    res.row_of_col.resize(n);
    res.u.resize(n);
    res.v.resize(n);
    for (std::size_t j = 1; j <= n; ++j) {
        res.row_of_col[j - 1] = p[j] - 1;
    }
    for (std::size_t i = 1; i <= n; ++i) {
        res.u[i - 1] = u[i];
        res.v[i - 1] = v[i];
    }
    return res;
}

// Rewrites an optimal perfect matching into the lexicographically smallest one
// among all optima. Every optimal matching lives on the tight edges of the
// final duals, so for each row in turn we take the smallest tight column that
// still admits a perfect matching of the rows below it.
class TieBreaker {
public:
    TieBreaker(const SquareProblem& pb, const HungarianResult& hr, double tol) : n_(pb.n), tight_(pb.n) {
        col_of_row_.assign(n_, 0);
        row_of_col_ = hr.row_of_col;
        for (std::size_t c = 0; c < n_; ++c) {
            col_of_row_[row_of_col_[c]] = c;
        }
        for (std::size_t r = 0; r < n_; ++r) {
            for (std::size_t c = 0; c < n_; ++c) {
                if (std::abs(pb.at(r, c) - hr.u[r] - hr.v[c]) <= tol || col_of_row_[r] == c) {
                    tight_[r].push_back(c);
                }
            }
        }
    }

    std::vector<std::size_t> run() {
        col_fixed_.assign(n_, 0);
        for (std::size_t r = 0; r < n_; ++r) {
            for (std::size_t c : tight_[r]) {
                if (col_fixed_[c]) {
                    continue;
                }
                if (c == col_of_row_[r] || reroute(r, c)) {
                    break;
                }
            }
            col_fixed_[col_of_row_[r]] = 1;
        }
        return col_of_row_;
    }

private:
    // Tries to give column `c` to row `r`; the displaced row must reach r's
    // current column through an alternating path over unfixed rows.
    bool reroute(std::size_t r, std::size_t c) {
        const std::size_t freed = col_of_row_[r];
        const std::size_t displaced = row_of_col_[c];
        if (displaced <= r) {
            return false;
        }
        // Temporarily detach r so its column is the only free one.
        row_of_col_[freed] = n_;
        col_of_row_[r] = c;
        row_of_col_[c] = r;
        visited_.assign(n_, 0);
        if (augment(displaced, r)) {
            return true;
        }
        // Undo.
        col_of_row_[r] = freed;
        row_of_col_[freed] = r;
        row_of_col_[c] = displaced;
        col_of_row_[displaced] = c;
        return false;
    }

    bool augment(std::size_t row, std::size_t pinned_row) {
        for (std::size_t c : tight_[row]) {
            if (col_fixed_[c] || visited_[c]) {
                continue;
            }
            visited_[c] = 1;
            const std::size_t owner = row_of_col_[c];
            if (owner == pinned_row) {
                continue;
            }
            if (owner == n_ || augment(owner, pinned_row)) {
                col_of_row_[row] = c;
                row_of_col_[c] = row;
                return true;
            }
        }
        return false;
    }

    std::size_t n_;
    std::vector<std::vector<std::size_t>> tight_;
    std::vector<std::size_t> col_of_row_;
    std::vector<std::size_t> row_of_col_;
    std::vector<char> col_fixed_;
    std::vector<char> visited_;
};

}  // namespace

std::vector<MatchedPair> solve_assignment(const CostMatrix& cost) {
    const std::size_t m = cost.rows();
    const std::size_t k = cost.cols();
    if (m == 0 || k == 0) {
        return {};
    }
    double max_abs = 0.0;
    bool any_allowed = false;
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            if (cost.forbidden(r, c)) {
                continue;
            }
            if (!std::isfinite(cost(r, c))) {
                throw InvalidArgument("allowed assignment costs must be finite");
            }
            max_abs = std::max(max_abs, std::abs(cost(r, c)));
            any_allowed = true;
        }
    }
    if (!any_allowed) {
        return {};
    }

    // Pad to square with zero-cost dummies. A forbidden cell costs more than any
    // possible spread of allowed totals, so the optimum first minimises how many
    // forbidden cells it is forced through, i.e. maximises allowed cardinality.
    SquareProblem pb;
    pb.n = std::max(m, k);
    const double big = 2.0 * static_cast<double>(pb.n) * max_abs + 1.0;
    pb.cost.assign(pb.n * pb.n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            pb.cost[r * pb.n + c] = cost.forbidden(r, c) ? big : cost(r, c);
        }
    }

    const HungarianResult hr = hungarian(pb);
    const double tol = 1e-9 * (1.0 + max_abs);
    const std::vector<std::size_t> col_of_row = TieBreaker(pb, hr, tol).run();

    std::vector<MatchedPair> out;
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t c = col_of_row[r];
        if (c < k && !cost.forbidden(r, c)) {
            out.push_back({r, c});
        }
    }
    return out;
}

double total_cost(const CostMatrix& cost, const std::vector<MatchedPair>& matching) {
    double sum = 0.0;
    for (const auto& mp : matching) {
        sum += cost(mp.row, mp.col);
    }
    return sum;
}

}  // namespace plantdoctor
