#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "moments/measure.hpp"
#include "moments/potential.hpp"
#include "moments/quadrature.hpp"

namespace moments {

struct SolverConfig {
    double gradient_tol = 1e-8;   // on max_i |m_i/Z - w_i|
    int max_iters = 1000;
    double ls_backtrack = 0.5;
    double ls_sufficient = 1e-4;
    bool use_mc = false;          // exact quadrature (dims 1-2) by default
    std::size_t mc_samples = 1 << 20;
    int memory = 10;              // limited-memory depth
    std::uint64_t seed = 1;
    int threads = 0;
    RPolicy r_policy{};
    std::vector<double> initial_values;  // empty: start from v = 0
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> objective_trace;
    std::vector<double> grad_norm_trace;
    std::vector<double> final_masses;  // normalized m_i/Z at the optimum
    GaugeTransform gauge;              // canonicalization gauge
    bool converged = false;
    double wall_time_s = 0.0;
    double final_objective = 0.0;
    double final_grad_norm = 0.0;
};

// I_mu(v) = log Z(v) - sum w_i v_i with mu normalized to a probability.
double objective(const DiscreteMeasure& mu, const Vec& v, const SolverConfig& cfg = {});

// g_i = m_i/Z - w_i; sums to zero.
Vec gradient(const DiscreteMeasure& mu, const Vec& v, const SolverConfig& cfg = {});

// Throws std::invalid_argument naming the violated existence condition.
void require_valid(const DiscreteMeasure& mu, double tol = kDefaultValidateTol);

// Limited-memory quasi-second-order ascent with backtracking line search and
// per-iteration gauge projection; returns the canonicalized maximizer.
std::pair<PolyhedralPotential, SolveReport> solve(const DiscreteMeasure& mu,
                                                  const SolverConfig& cfg = {});

// Gauge (b, c) with b zeroing the first moment of e^{-psi} and c making Z = 1.
std::pair<PolyhedralPotential, GaugeTransform> canonicalize(
    const PolyhedralPotential& p, const RPolicy& policy = {}, int threads = 0);

}  // namespace moments
