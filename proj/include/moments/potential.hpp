#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "moments/geometry.hpp"

namespace moments {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kActiveTol = 1e-12;

// Certificate that e^{-psi} has a finite positive integral: alpha is the
// recession rate min_{|theta|=1} max_i y_i . theta (positive iff the origin is
// interior to the hull of the atoms) and beta = max_i v_i, giving the bound
// psi(x) >= alpha |x| - beta used by tail estimates and MC proposals.
struct IntegrabilityWitness {
    bool integrable = false;
    double alpha = 0.0;
    double beta = 0.0;
    bool exact = true;  // false when alpha came from sampled directions (dim >= 3, many atoms)
};

// psi_v(x) = max_i (y_i . x - v_i): a finite polyhedral convex function.
// Immutable after construction; all operations on it are pure.
struct PolyhedralPotential {
    int dim = 0;
    std::vector<Vec> atoms;
    std::vector<double> values;

    int size() const { return static_cast<int>(atoms.size()); }
};

// (b, c) maps v_i -> v_i + y_i.b + c, so psi_v(x) -> psi_v(x - b) - c and the
// unnormalized mass scales by e^{c}.
struct GaugeTransform {
    Vec translation;
    double constant = 0.0;
};

struct EvalResult {
    double value;
    int argmax;
};

// Max of the affine pieces; ties resolve to the lowest index.
EvalResult eval(const PolyhedralPotential& p, const Vec& x);

// y_{argmax(x)}: the gradient a.e., a subgradient everywhere.
Vec subgradient(const PolyhedralPotential& p, const Vec& x);

// Lower convex envelope of the data {(y_i, v_i)} at y: the Legendre transform
// of psi_v. +infinity outside conv(atoms). Exact hull construction in
// dimension 1, small linear program otherwise.
double conjugate_at(const PolyhedralPotential& p, const Vec& y);

// Indices whose lifted point lies on the lower hull (within kActiveTol).
std::vector<int> active_set(const PolyhedralPotential& p);

// Dimension 1 only: indices on the lower convex hull of the lifted data,
// sorted by abscissa (degenerate collinear points kept).
std::vector<int> lower_hull_1d(const PolyhedralPotential& p);

PolyhedralPotential apply_gauge(const PolyhedralPotential& p, const GaugeTransform& g);

IntegrabilityWitness check_integrability(const PolyhedralPotential& p);

void validate_potential(const PolyhedralPotential& p);  // throws on malformed data

}  // namespace moments
