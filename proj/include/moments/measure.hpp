#pragma once

#include <vector>

#include "moments/geometry.hpp"

namespace moments {

inline constexpr double kDefaultValidateTol = 1e-9;

// Weighted atoms y_i with w_i > 0: the target measure mu.
struct DiscreteMeasure {
    int dim = 0;
    std::vector<Vec> atoms;
    std::vector<double> weights;

    int size() const { return static_cast<int>(atoms.size()); }
    double total_mass() const;
    Vec barycenter() const;
};

// Existence/uniqueness hypotheses: finite positive mass, atoms not supported
// in a lower-dimensional subspace, barycenter at the origin.
struct ValidationReport {
    bool mass_ok = false;
    bool span_ok = false;
    bool barycenter_ok = false;
    Vec barycenter_vector;
    double smallest_singular_value = 0.0;

    bool all_ok() const { return mass_ok && span_ok && barycenter_ok; }
};

ValidationReport validate(const DiscreteMeasure& mu, double tol = kDefaultValidateTol);

// Translate atoms by -barycenter; idempotent.
DiscreteMeasure center(const DiscreteMeasure& mu);

// N i.i.d.-uniform atoms in a simple polygon, equal weights, then centered.
DiscreteMeasure sample_uniform_polygon(const Polygon2& polygon, int n_atoms,
                                       std::uint64_t seed);

// Equal-weight unit-norm atoms with exact antipodal pairing (barycenter 0).
DiscreteMeasure sphere_atoms(int dim, int n_atoms);

// n+1 regular-simplex unit vertices summing to zero, equal weights.
DiscreteMeasure simplex_vertices(int dim);

Polygon2 regular_polygon(int sides, double radius = 1.0);

}  // namespace moments
