#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "moments/cells.hpp"
#include "moments/geometry.hpp"
#include "moments/potential.hpp"

namespace moments {

// Cell masses of e^{-psi}: m_i = integral over cell i, Z = sum. Exact paths
// carry a certified truncation bound in the error fields; the MC path carries
// standard errors.
struct MassResult {
    std::vector<double> masses;
    std::vector<double> mass_errors;
    double total = 0.0;
    double total_error = 0.0;
    Vec first_moment;
    Vec first_moment_error;
    std::vector<Vec> cell_moments;  // per-cell first moments (exact paths)
    bool exact = true;
    double radius = 0.0;  // truncation radius (2D exact path)
};

// Divided difference of exp over the given nodes (repeats allowed). Series
// evaluation on tight node clusters, recursive table otherwise.
double exp_divided_difference(std::span<const double> nodes);

// Exact integral of e^{-(a.x - b)} over a bounded simple polygon.
double exp_affine_polygon(const Polygon2& poly, Pt2 a, double b);

// Exact first moment: integral of x e^{-(a.x - b)} over a bounded polygon.
Pt2 exp_affine_polygon_moment(const Polygon2& poly, Pt2 a, double b);

// Divergence guard for unbounded cells: the integrand decays along every
// recession ray iff a.ray > 0.
void require_convergent_rays(const Cell& cell, Pt2 a);

// Upper bound for the mass of e^{-psi} outside the box ||x||_inf <= R, from
// psi(x) >= alpha |x| - beta.
double tail_bound(const IntegrabilityWitness& w, int dim, double radius);
double tail_bound(const PolyhedralPotential& p, double radius);
// Same for the absolute first moment integrand |x| e^{-psi}.
double tail_moment_bound(const IntegrabilityWitness& w, int dim, double radius);

struct RPolicy {
    double rel_tol = 1e-14;    // tail bound target relative to a lower bound on Z
    double fixed_radius = 0.0; // > 0 overrides the automatic choice
};

double choose_truncation_radius(const PolyhedralPotential& p,
                                const IntegrabilityWitness& w, const RPolicy& policy);

// Exact masses, dimension 2: clip-plus-certified-tail over the decomposition.
MassResult exact_masses_2d(const PolyhedralPotential& p, const CellDecomposition& cells,
                           const RPolicy& policy = {}, int threads = 0);

// Exact masses, dimension 1: closed-form integrals over interval cells,
// including the unbounded end cells (no truncation).
MassResult exact_masses_1d(const PolyhedralPotential& p);

// Dispatcher: exact 1D/2D.
MassResult exact_masses(const PolyhedralPotential& p, const RPolicy& policy = {},
                        int threads = 0);

struct McOptions {
    std::size_t samples = 1 << 20;
    std::uint64_t seed = 1;
    double proposal_rate = 0.0;        // 0: alpha/2 from the witness
    double explosion_threshold = 1e6;  // on the squared coefficient of variation
    int threads = 0;
};

// Importance-sampled masses in any dimension, deterministic per seed.
MassResult mc_masses(const PolyhedralPotential& p, const McOptions& opt);

}  // namespace moments
