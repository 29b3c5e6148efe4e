#pragma once

#include <vector>

namespace moments {

// Dense two-phase primal simplex for small equality-form programs:
//   minimize c·x  subject to  A x = b,  x >= 0,
// with A given row-major (m rows, n columns). Bland's rule, so it terminates
// on degenerate inputs. Intended for a handful of rows and at most a few
// hundred columns.
struct LpResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> x;
};

LpResult solve_lp(const std::vector<double>& a_rowmajor, int m, int n,
                  const std::vector<double>& b, const std::vector<double>& c,
                  double tol = 1e-11);

}  // namespace moments
