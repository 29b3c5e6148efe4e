#include "moments/simplex_lp.hpp"

#include <cmath>
#include <limits>

namespace moments {

namespace {

// Tableau layout: rows 0..m-1 are constraints over (n structural + m artificial)
// columns plus rhs; the cost row is maintained separately per phase.
struct Tableau {
    int m, n;                   // constraints, total columns
    std::vector<double> t;      // m x (n+1), row-major; last column is rhs
    std::vector<int> basis;     // size m, column index basic in each row

    double& at(int r, int c) { return t[static_cast<std::size_t>(r) * (n + 1) + c]; }
    double rhs(int r) const { return t[static_cast<std::size_t>(r) * (n + 1) + n]; }
};

void pivot(Tableau& tb, std::vector<double>& cost, double& cost_rhs, int pr, int pc) {
    const double piv = tb.at(pr, pc);
    const double inv = 1.0 / piv;
    for (int c = 0; c <= tb.n; ++c) tb.at(pr, c) *= inv;
    for (int r = 0; r < tb.m; ++r) {
        if (r == pr) continue;
        const double f = tb.at(r, pc);
        if (f == 0.0) continue;
        for (int c = 0; c <= tb.n; ++c) tb.at(r, c) -= f * tb.at(pr, c);
    }
    const double f = cost[pc];
    if (f != 0.0) {
        for (int c = 0; c < tb.n; ++c) cost[c] -= f * tb.at(pr, c);
        cost_rhs -= f * tb.t[static_cast<std::size_t>(pr) * (tb.n + 1) + tb.n];
    }
    tb.basis[pr] = pc;
}

// Runs simplex iterations with Bland's rule on the given reduced-cost row.
// Returns false on unboundedness (cannot occur for our bounded programs but
// guarded anyway).
bool iterate(Tableau& tb, std::vector<double>& cost, double& cost_rhs, double tol,
             int allowed_cols) {
    const int max_iter = 50 * (tb.n + tb.m) + 1000;
    for (int it = 0; it < max_iter; ++it) {
        int pc = -1;
        for (int c = 0; c < allowed_cols; ++c) {
            if (cost[c] < -tol) {
                pc = c;
                break;
            }
        }
        if (pc < 0) return true;  // optimal
        int pr = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < tb.m; ++r) {
            const double a = tb.at(r, pc);
            if (a > tol) {
                const double ratio = tb.rhs(r) / a;
                if (ratio < best - 1e-15 ||
                    (std::abs(ratio - best) <= 1e-15 && (pr < 0 || tb.basis[r] < tb.basis[pr]))) {
                    best = ratio;
                    pr = r;
                }
            }
        }
        if (pr < 0) return false;  // unbounded
        pivot(tb, cost, cost_rhs, pr, pc);
    }
    return true;
}

}  // namespace

LpResult solve_lp(const std::vector<double>& a_rowmajor, int m, int n,
                  const std::vector<double>& b, const std::vector<double>& c, double tol) {
    LpResult res;
    Tableau tb;
    tb.m = m;
    tb.n = n + m;  // structural + artificial
    tb.t.assign(static_cast<std::size_t>(m) * (tb.n + 1), 0.0);
    tb.basis.assign(m, 0);

    for (int r = 0; r < m; ++r) {
        const double sign = (b[r] < 0.0) ? -1.0 : 1.0;
        for (int cidx = 0; cidx < n; ++cidx)
            tb.at(r, cidx) = sign * a_rowmajor[static_cast<std::size_t>(r) * n + cidx];
        tb.at(r, n + r) = 1.0;
        tb.at(r, tb.n) = sign * b[r];
        tb.basis[r] = n + r;
    }

    // Phase 1: minimize the sum of artificials.
    std::vector<double> cost(tb.n, 0.0);
    double cost_rhs = 0.0;
    for (int r = 0; r < m; ++r) {
        for (int cidx = 0; cidx <= tb.n; ++cidx) {
            if (cidx < tb.n)
                cost[cidx] -= tb.at(r, cidx);
            else
                cost_rhs -= tb.rhs(r);
        }
    }
    for (int r = 0; r < m; ++r) cost[n + r] = 0.0;
    if (!iterate(tb, cost, cost_rhs, tol, tb.n)) return res;
    if (-cost_rhs > 1e-8 * (1.0 + std::abs(cost_rhs))) return res;  // infeasible
    if (-cost_rhs > 1e-7) return res;

    // Drive leftover artificial variables out of the basis when possible.
    for (int r = 0; r < m; ++r) {
        if (tb.basis[r] >= n) {
            int pc = -1;
            for (int cidx = 0; cidx < n; ++cidx) {
                if (std::abs(tb.at(r, cidx)) > 1e-9) {
                    pc = cidx;
                    break;
                }
            }
            if (pc >= 0) pivot(tb, cost, cost_rhs, r, pc);
        }
    }

    // Phase 2 over structural columns only.
    std::vector<double> cost2(tb.n, 0.0);
    double cost2_rhs = 0.0;
    for (int cidx = 0; cidx < n; ++cidx) cost2[cidx] = c[cidx];
    for (int r = 0; r < m; ++r) {
        const int bcol = tb.basis[r];
        const double cb = (bcol < n) ? c[bcol] : 0.0;
        if (cb == 0.0) continue;
        for (int cidx = 0; cidx < tb.n; ++cidx) cost2[cidx] -= cb * tb.at(r, cidx);
        cost2_rhs -= cb * tb.rhs(r);
    }
    for (int r = 0; r < m; ++r)
        if (tb.basis[r] >= n) cost2[tb.basis[r]] = 0.0;
    // Forbid re-entering artificial columns.
    if (!iterate(tb, cost2, cost2_rhs, tol, n)) return res;

    res.feasible = true;
    res.x.assign(n, 0.0);
    double obj = 0.0;
    for (int r = 0; r < m; ++r) {
        if (tb.basis[r] < n) {
            res.x[tb.basis[r]] = tb.rhs(r);
            obj += c[tb.basis[r]] * tb.rhs(r);
        }
    }
    res.objective = obj;
    return res;
}

}  // namespace moments
