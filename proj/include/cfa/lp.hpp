#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace cfa {

enum class Relation { less_equal, equal };

struct LpRow {
    std::vector<double> coeffs;  // length num_vars
    Relation relation = Relation::less_equal;
    double rhs = 0.0;
};

// min c.x  s.t. rows, x >= 0, and optionally x <= upper_bound.
struct LinearProgram {
    std::size_t num_vars = 0;
    std::vector<double> objective;     // length num_vars
    std::vector<LpRow> rows;
    std::vector<double> upper_bound;   // empty, or length num_vars with
                                       // +infinity meaning unbounded
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;        // empty unless optimal
    double objective_value = 0.0;
};

void validate(const LinearProgram& lp);

// Dense two-phase primal simplex with Bland's anti-cycling rule. Scans are
// fixed-order, so identical input yields an identical vertex, including
// among degenerate optima. Constraints of a returned optimum hold within
// 1e-8 and the reduced-cost certificate is checked internally.
LpSolution solve(const LinearProgram& lp);

// Fixed-point tabular listing of the whole program, for external checks.
void dump(const LinearProgram& lp, std::ostream& out);

}  // namespace cfa
