#include "moments/measure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace moments {

double DiscreteMeasure::total_mass() const {
    double w = 0.0;
    for (double v : weights) w += v;
    return w;
}

Vec DiscreteMeasure::barycenter() const {
    Vec b(dim, 0.0);
    const double w = total_mass();
    for (int i = 0; i < size(); ++i)
        for (int k = 0; k < dim; ++k) b[k] += weights[i] * atoms[i][k];
    for (double& c : b) c /= w;
    return b;
}

ValidationReport validate(const DiscreteMeasure& mu, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("validate: tol must be positive");
    if (mu.atoms.empty()) throw std::invalid_argument("validate: empty atom list");
    if (mu.atoms.size() != mu.weights.size())
        throw std::invalid_argument("validate: atoms/weights length mismatch");

    ValidationReport rep;
    const double w = mu.total_mass();
    bool weights_ok = std::isfinite(w) && w > 0.0;
    for (double v : mu.weights) weights_ok = weights_ok && std::isfinite(v) && v > 0.0;
    rep.mass_ok = weights_ok;

    rep.barycenter_vector = mu.barycenter();
    rep.barycenter_ok = rep.mass_ok && norm2(rep.barycenter_vector) <= tol;

    // Smallest singular value of the weighted atom matrix (rows
    // sqrt(w_i/W) y_i^T), via the n x n second-moment matrix.
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(mu.dim, mu.dim);
    for (int i = 0; i < mu.size(); ++i) {
        const double wi = std::max(mu.weights[i], 0.0) / std::max(w, 1e-300);
        for (int r = 0; r < mu.dim; ++r)
            for (int k = 0; k < mu.dim; ++k) c(r, k) += wi * mu.atoms[i][r] * mu.atoms[i][k];
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    rep.smallest_singular_value =
        mu.size() >= mu.dim ? std::sqrt(std::max(0.0, es.eigenvalues()(0))) : 0.0;
    rep.span_ok = rep.mass_ok && rep.smallest_singular_value > tol;
    return rep;
}

DiscreteMeasure center(const DiscreteMeasure& mu) {
    if (mu.atoms.empty()) throw std::invalid_argument("center: empty measure");
    const Vec b = mu.barycenter();
    DiscreteMeasure out = mu;
    for (auto& a : out.atoms)
        for (int k = 0; k < mu.dim; ++k) a[k] -= b[k];
    return out;
}

DiscreteMeasure sample_uniform_polygon(const Polygon2& polygon, int n_atoms,
                                       std::uint64_t seed) {
    const double area = std::abs(polygon_area(polygon));
    if (polygon.size() < 3 || area <= 0.0)
        throw std::invalid_argument("sample_uniform_polygon: degenerate polygon");
    if (n_atoms < 3) throw std::invalid_argument("sample_uniform_polygon: need >= n+1 atoms");

    const auto tris = triangulate_simple_polygon(polygon);
    std::vector<double> cum;
    cum.reserve(tris.size());
    double acc = 0.0;
    for (const auto& t : tris) {
        const Pt2 a = polygon[t[0]], b = polygon[t[1]], c = polygon[t[2]];
        acc += 0.5 * std::abs(cross(b - a, c - a));
        cum.push_back(acc);
    }

    Rng rng(seed);
    DiscreteMeasure mu;
    mu.dim = 2;
    mu.weights.assign(n_atoms, 1.0 / n_atoms);
    mu.atoms.reserve(n_atoms);
    for (int i = 0; i < n_atoms; ++i) {
        const double pick = rng.uniform() * acc;
        const std::size_t ti =
            std::min<std::size_t>(std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin(),
                                  tris.size() - 1);
        const Pt2 a = polygon[tris[ti][0]], b = polygon[tris[ti][1]], c = polygon[tris[ti][2]];
        double r1 = std::sqrt(rng.uniform());
        double r2 = rng.uniform();
        const Pt2 p = (1.0 - r1) * a + (r1 * (1.0 - r2)) * b + (r1 * r2) * c;
        mu.atoms.push_back({p.x, p.y});
    }
    return center(mu);
}

DiscreteMeasure sphere_atoms(int dim, int n_atoms) {
    if (n_atoms < 2 * dim) throw std::invalid_argument("sphere_atoms: need N >= 2n");
    if (n_atoms % 2 != 0) throw std::invalid_argument("sphere_atoms: need N even");
    DiscreteMeasure mu;
    mu.dim = dim;
    mu.weights.assign(n_atoms, 1.0 / n_atoms);
    const int half = n_atoms / 2;
    std::vector<Vec> pos;
    pos.reserve(half);
    if (dim == 1) {
        if (half != 1) throw std::invalid_argument("sphere_atoms: dim 1 admits only N=2");
        pos.push_back({1.0});
    } else if (dim == 2) {
        for (int k = 0; k < half; ++k) {
            const double th = std::numbers::pi * static_cast<double>(k) / half;
            pos.push_back({std::cos(th), std::sin(th)});
        }
    } else {
        Rng rng(0x5347u + 1315423911ULL * static_cast<std::uint64_t>(dim) +
                2654435761ULL * static_cast<std::uint64_t>(n_atoms));
        for (int k = 0; k < half; ++k) {
            Vec u(dim);
            double s;
            do {
                s = 0.0;
                for (int j = 0; j < dim; ++j) {
                    u[j] = rng.normal();
                    s += u[j] * u[j];
                }
            } while (s < 1e-12);
            s = std::sqrt(s);
            for (int j = 0; j < dim; ++j) u[j] /= s;
            pos.push_back(u);
        }
    }
    for (const auto& u : pos) mu.atoms.push_back(u);
    for (const auto& u : pos) {
        Vec v(dim);
        for (int j = 0; j < dim; ++j) v[j] = -u[j];
        mu.atoms.push_back(v);
    }
    return mu;
}

DiscreteMeasure simplex_vertices(int dim) {
    if (dim < 1) throw std::invalid_argument("simplex_vertices: dim must be >= 1");
    // Recursive regular-simplex construction: unit vertices, pairwise dot -1/n.
    std::vector<Vec> verts;
    if (dim == 1) {
        verts = {{1.0}, {-1.0}};
    } else {
        const DiscreteMeasure sub = simplex_vertices(dim - 1);
        verts.push_back(Vec(dim, 0.0));
        verts[0][0] = 1.0;
        const double c = -1.0 / dim;
        const double s = std::sqrt(1.0 - c * c);
        for (const auto& u : sub.atoms) {
            Vec v(dim);
            v[0] = c;
            for (int k = 1; k < dim; ++k) v[k] = s * u[k - 1];
            verts.push_back(v);
        }
    }
    DiscreteMeasure mu;
    mu.dim = dim;
    mu.atoms = std::move(verts);
    mu.weights.assign(mu.atoms.size(), 1.0 / static_cast<double>(mu.atoms.size()));
    return mu;
}

Polygon2 regular_polygon(int sides, double radius) {
    Polygon2 poly;
    poly.reserve(sides);
    for (int k = 0; k < sides; ++k) {
        const double th = 2.0 * std::numbers::pi * k / sides;
        poly.push_back({radius * std::cos(th), radius * std::sin(th)});
    }
    return poly;
}

}  // namespace moments
