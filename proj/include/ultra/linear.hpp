#pragma once

#include "ultra/scalar.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ultra {

/// Too many variables or constraints for Fourier-Motzkin elimination.
class SizeLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// a . x <= b, or a . x < b when strict; for equalities a . x = b.
struct LinearRow {
    std::vector<Scalar> a;
    Scalar b;
    bool strict = false;
};

struct LinearProblem {
    std::size_t variables = 0;
    std::vector<LinearRow> equalities;
    std::vector<LinearRow> inequalities;
};

struct LinearSolution {
    bool feasible = false;
    /// Lexicographically smallest point in the free coordinates left after
    /// eliminating the equalities.
    std::vector<Scalar> point;
    /// Affine dimension of the feasible set.
    std::size_t dimension = 0;
};

/// Reduced row echelon form of [A | b]. Zero rows are dropped and `pivots`
/// receives the pivot column of each kept row. False if the rows are inconsistent.
bool row_reduce(std::vector<LinearRow>& rows, std::size_t columns, std::vector<std::size_t>& pivots);

/// True when the system of (possibly strict) inequalities has a solution.
bool fm_feasible(std::vector<LinearRow> rows, std::size_t variables);

/**
 * Exact feasibility: Gaussian elimination on the equalities, then
 * Fourier-Motzkin on the remaining free variables. Throws SizeLimit when
 * more than `max_free` variables remain.
 */
LinearSolution solve_linear(const LinearProblem& p, std::size_t max_free = 40);

}  // namespace ultra
