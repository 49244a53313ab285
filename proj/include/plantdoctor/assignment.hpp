#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace plantdoctor {

/// Dense row-major cost matrix with an optional per-cell "forbidden" flag.
class CostMatrix {
public:
    CostMatrix() = default;
    CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), cost_(rows * cols, fill), forbidden_(rows * cols, 0) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    [[nodiscard]] double& operator()(std::size_t r, std::size_t c) noexcept { return cost_[r * cols_ + c]; }
    [[nodiscard]] double operator()(std::size_t r, std::size_t c) const noexcept { return cost_[r * cols_ + c]; }

    void forbid(std::size_t r, std::size_t c) noexcept { forbidden_[r * cols_ + c] = 1; }
    [[nodiscard]] bool forbidden(std::size_t r, std::size_t c) const noexcept { return forbidden_[r * cols_ + c] != 0; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> cost_;
    std::vector<std::uint8_t> forbidden_;
};

struct MatchedPair {
    std::size_t row = 0;
    std::size_t col = 0;

    bool operator==(const MatchedPair&) const = default;
};

/// Minimum-cost rectangular assignment over the allowed cells.
///
/// Cardinality is maximised first (min(rows, cols) whenever the allowed cells
/// admit it), then total cost is minimised. Among equal-cost optima the
/// lexicographically smallest (row, col) sequence wins. Pairs are returned in
/// ascending row order. Costs of allowed cells must be finite.
[[nodiscard]] std::vector<MatchedPair> solve_assignment(const CostMatrix& cost);

[[nodiscard]] double total_cost(const CostMatrix& cost, const std::vector<MatchedPair>& matching);

}  // namespace plantdoctor
