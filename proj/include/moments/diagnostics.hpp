#pragma once

#include <array>
#include <string>
#include <vector>

#include "moments/forward.hpp"
#include "moments/measure.hpp"
#include "moments/potential.hpp"
#include "moments/solver.hpp"

namespace moments {

// One certified comparison. Sign convention: margin = rhs - lhs, and the check
// passes iff margin >= -tolerance.
struct CheckResult {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tolerance = 1e-9;
    bool pass = false;
    std::string metadata;
};

CheckResult make_check(const std::string& name, double lhs, double rhs, double tolerance,
                       const std::string& metadata = "");

// Integral of e^{-phi} over conv(atoms), phi the lower convex envelope of the
// data; exact piecewise-linear decomposition (dims 1-2).
double conjugate_integral(const PolyhedralPotential& p, int threads = 0);

// inf over unit directions of the mean absolute projection of mu
// (probability-normalized); direction grid in 2D, sampled in higher dimension.
double min_directional_abs_moment(const DiscreteMeasure& mu);

// log Z(v_lambda) >= (1-lambda) log Z(u0) + lambda log Z(u1) on a shared atom
// set (the midpoint form of the log-concavity of Z in the values).
CheckResult check_prekopa_midpoint(const std::vector<Vec>& atoms, int dim,
                                   const std::vector<double>& u0,
                                   const std::vector<double>& u1, double lambda);

// log Z0 - log Z1 >= sum (m_i/Z0) (phi0 - phi1)(y_i), phi's the envelopes.
CheckResult check_subgradient_prekopa(const PolyhedralPotential& p0,
                                      const std::vector<double>& v1);

// Z * integral e^{-phi} <= (2 pi)^n for a centered potential.
CheckResult check_santalo(const PolyhedralPotential& p, bool enforce_centering = true,
                          int threads = 0);

// psi(0) <= inf psi + n for a centered potential.
CheckResult check_fradelizi(const PolyhedralPotential& p, bool enforce_centering = true);

// The two lower-bound inequalities behind the existence argument; phi data is
// shifted so the envelope vanishes at the origin. Returns {volume-form bound,
// conjugate-form bound}.
std::array<CheckResult, 2> check_lower_bound_lemma(const DiscreteMeasure& mu,
                                                   const PolyhedralPotential& p_test,
                                                   double cmu_inflation = 1.0);

// Forward gallery: compares sampled push-forward statistics of a named
// closed-form potential against its target measure.
std::vector<CheckResult> gallery_run(const std::string& case_name, int dim,
                                     std::size_t samples, std::uint64_t seed,
                                     int threads = 0);

struct SweepResult {
    std::vector<CheckResult> results;
    bool all_pass = true;
};

SweepResult sweep_prekopa_midpoint(int n_seeds, int threads = 0);
SweepResult sweep_subgradient_prekopa(int n_seeds, int threads = 0);
SweepResult sweep_santalo(int n_seeds, int threads = 0);
SweepResult sweep_fradelizi(int n_seeds, int threads = 0);
SweepResult sweep_lower_bound(int n_seeds, int threads = 0);
// Planted violations; each result passes iff the corresponding checker
// correctly flags (or refuses) its corrupted input.
SweepResult negative_controls();

// Deterministic random test instances shared by sweeps and tests.
PolyhedralPotential random_potential_2d(std::uint64_t seed, int n_atoms,
                                        double value_spread = 0.5);
DiscreteMeasure random_measure_2d(std::uint64_t seed, int n_atoms);

}  // namespace moments
