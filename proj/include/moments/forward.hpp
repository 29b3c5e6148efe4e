#pragma once

#include <functional>
#include <string>
#include <vector>

#include "moments/measure.hpp"
#include "moments/potential.hpp"
#include "moments/quadrature.hpp"

namespace moments {

// A smooth convex potential given by evaluators, for sample-based forward
// computation. growth_rate is a linear lower-growth rate of psi used to pick
// the importance-sampling proposal.
struct AnalyticPotential {
    int dim = 0;
    std::string name;
    std::function<double(const Vec&)> psi;
    std::function<Vec(const Vec&)> grad;
    double growth_rate = 1.0;
};

// A computed push-forward: exact atoms (polyhedral path) or a weighted sample
// cloud. Weights are normalized to sum 1; coordinates are stored row-major.
struct MomentMeasureEstimate {
    int dim = 0;
    bool exact = true;
    std::vector<double> coords;
    std::vector<double> weights;
    double total = 1.0;  // unnormalized mass relative to the probability input
    Vec barycenter;
    Vec barycenter_se;

    std::size_t size() const { return weights.size(); }
    Vec point(std::size_t i) const {
        return Vec(coords.begin() + static_cast<std::ptrdiff_t>(i) * dim,
                   coords.begin() + static_cast<std::ptrdiff_t>(i + 1) * dim);
    }
};

struct Statistic {
    double value = 0.0;
    double se = 0.0;
};

// Self-normalized weighted statistic with its standard error.
Statistic weighted_stat(const MomentMeasureEstimate& m,
                        const std::function<double(const double*)>& g);

// Push-forward of a polyhedral potential: exactly sum (m_i/Z) delta_{y_i}.
// Exact quadrature in dimensions 1-2, importance sampling otherwise.
MomentMeasureEstimate moment_measure_polyhedral(const PolyhedralPotential& p,
                                                const RPolicy& policy = {},
                                                int threads = 0);
MomentMeasureEstimate moment_measure_polyhedral_mc(const PolyhedralPotential& p,
                                                   const McOptions& opt);

// Draws from e^{-psi}/Z by self-normalized importance sampling and maps the
// draws through the gradient.
MomentMeasureEstimate moment_measure_sampled(const AnalyticPotential& a,
                                             std::size_t samples, std::uint64_t seed,
                                             int threads = 0);

// Necessary conditions of the inverse problem on an estimate, with
// sampling-aware tolerances (4 standard errors of the barycenter).
ValidationReport necessary_conditions_report(const MomentMeasureEstimate& m);

// Reweights by |y|: the surface-area-style variant; total becomes the
// |gradient|-weighted mass relative to the probability-normalized input.
MomentMeasureEstimate surface_variant(const MomentMeasureEstimate& m);

// Max residual of the one-dimensional inversion identity
// (psi^{-1})'(-log tail_moment(y)) = 1/y over the grid, using the increasing
// branch of psi starting at branch_lo. tail_moment(y) = integral of t dmu(t)
// over [y, inf).
double one_dim_identity_residual(const AnalyticPotential& psi,
                                 const std::function<double(double)>& tail_moment,
                                 const std::vector<double>& grid,
                                 double branch_lo = 0.0);

// Gallery of closed-form potentials.
AnalyticPotential gaussian_potential(int dim);
AnalyticPotential cube_potential(int dim);
AnalyticPotential norm_potential(int dim);     // psi(x) = |x|
AnalyticPotential simplex_potential(int dim);  // log-sum-exp over simplex vertices
// psi(x) = base(T x); the push-forward becomes the T^T-image of base's.
AnalyticPotential linear_image_potential(const AnalyticPotential& base,
                                         const std::vector<Vec>& t_matrix);

}  // namespace moments
