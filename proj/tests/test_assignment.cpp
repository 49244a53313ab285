#include <doctest.h>

#include <algorithm>

#include "plantdoctor/assignment.hpp"
#include "support/generators.hpp"

using namespace plantdoctor;

namespace {

CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    CostMatrix c(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t k = 0; k < rows[r].size(); ++k) {
            c(r, k) = rows[r][k];
        }
    }
    return c;
}

bool is_partial_bijection(const std::vector<MatchedPair>& m, const CostMatrix& c) {
    std::vector<bool> rows(c.rows()), cols(c.cols());
    for (const MatchedPair& p : m) {
        if (p.row >= c.rows() || p.col >= c.cols() || rows[p.row] || cols[p.col] || c.forbidden(p.row, p.col)) {
            return false;
        }
        rows[p.row] = cols[p.col] = true;
    }
    return true;
}

}  // namespace

TEST_CASE("identity-like matrix gives the diagonal") {
    const CostMatrix c = from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
    const auto m = solve_assignment(c);
    CHECK(m == std::vector<MatchedPair>{{0, 0}, {1, 1}, {2, 2}});
    CHECK(total_cost(c, m) == 0.0);
}

TEST_CASE("three by three worked example") {
    const CostMatrix c = from_rows({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}});
    const auto m = solve_assignment(c);
    CHECK(m == std::vector<MatchedPair>{{0, 1}, {1, 0}, {2, 2}});
    CHECK(total_cost(c, m) == 5.0);
}

TEST_CASE("all pairs forbidden gives an empty matching") {
    CostMatrix c(3, 2, 1.0);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t k = 0; k < 2; ++k) {
            c.forbid(r, k);
        }
    }
    CHECK(solve_assignment(c).empty());
    CHECK(solve_assignment(CostMatrix(0, 4)).empty());
    CHECK(solve_assignment(CostMatrix(4, 0)).empty());
}

TEST_CASE("cardinality beats cost when cells are forbidden") {
    // Row 0 could take col 0 cheaply, but then row 1 is left without a partner.
    CostMatrix c = from_rows({{0, 100}, {1, 1}});
    c.forbid(1, 1);
    const auto m = solve_assignment(c);
    CHECK(m == std::vector<MatchedPair>{{0, 1}, {1, 0}});
}

TEST_CASE("ties resolve to the lexicographically smallest matching") {
    const CostMatrix flat(3, 3, 1.0);
    CHECK(solve_assignment(flat) == std::vector<MatchedPair>{{0, 0}, {1, 1}, {2, 2}});
    const CostMatrix wide(2, 4, 0.0);
    CHECK(solve_assignment(wide) == std::vector<MatchedPair>{{0, 0}, {1, 1}});
    const CostMatrix tall(4, 2, 0.0);
    CHECK(solve_assignment(tall) == std::vector<MatchedPair>{{0, 0}, {1, 1}});
}

TEST_CASE("solver agrees with exhaustive search on random matrices") {
    testgen::Rng rng(2024);
    for (int seed = 0; seed < 300; ++seed) {
        const std::size_t rows = static_cast<std::size_t>(rng.uniform_int(1, 6));
        const std::size_t cols = static_cast<std::size_t>(rng.uniform_int(1, 6));
        const CostMatrix c = testgen::random_costs(rng, rows, cols, seed % 3 == 0 ? 0.3 : 0.0);
        const auto m = solve_assignment(c);
        const auto ref = testgen::brute_force_assignment(c);
        REQUIRE(is_partial_bijection(m, c));
        CHECK(m.size() == ref.cardinality);
        CHECK(total_cost(c, m) == ref.cost);
        CHECK(std::is_sorted(m.begin(), m.end(), [](const MatchedPair& a, const MatchedPair& b) { return a.row < b.row; }));
    }
}

TEST_CASE("solver handles real-valued and negative costs") {
    testgen::Rng rng(99);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 5));
        CostMatrix c(n, n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t k = 0; k < n; ++k) {
                c(r, k) = rng.uniform(-3.0, 3.0);
            }
        }
        const auto m = solve_assignment(c);
        CHECK(m.size() == n);
        CHECK(total_cost(c, m) == doctest::Approx(testgen::brute_force_assignment(c).cost).epsilon(1e-12));
    }
}
