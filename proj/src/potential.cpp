#include "moments/potential.hpp"

#include <algorithm>
#include <cmath>

#include "moments/simplex_lp.hpp"

namespace moments {

namespace {

double data_scale(const PolyhedralPotential& p) {
    double s = 1.0;
    for (const auto& a : p.atoms)
        for (double c : a) s = std::max(s, std::abs(c));
    for (double v : p.values) s = std::max(s, std::abs(v));
    return s;
}

// Lower hull of the lifted 1D data, as indices sorted by abscissa.
std::vector<int> lower_hull_1d_impl(const PolyhedralPotential& p, double tol) {
    const int n = p.size();
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return p.atoms[a][0] < p.atoms[b][0]; });
    std::vector<int> hull;
    for (int idx : order) {
        const double x = p.atoms[idx][0], v = p.values[idx];
        while (hull.size() >= 2) {
            const int a = hull[hull.size() - 2], b = hull.back();
            const double xa = p.atoms[a][0], va = p.values[a];
            const double xb = p.atoms[b][0], vb = p.values[b];
            // Pop b when it lies strictly above the chord a..idx; collinear
            // points stay (degenerate-active).
            const double t = (vb - va) * (x - xa) - (v - va) * (xb - xa);
            if (t <= tol) break;
            hull.pop_back();
        }
        hull.push_back(idx);
    }
    return hull;
}

double conjugate_1d(const PolyhedralPotential& p, double y) {
    const double tol = kActiveTol * data_scale(p);
    const std::vector<int> hull = lower_hull_1d_impl(p, tol);
    const double lo = p.atoms[hull.front()][0];
    const double hi = p.atoms[hull.back()][0];
    if (y < lo - tol || y > hi + tol) return kInfinity;
    if (y <= lo) return p.values[hull.front()];
    if (y >= hi) return p.values[hull.back()];
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        const double xa = p.atoms[hull[k]][0], xb = p.atoms[hull[k + 1]][0];
        if (y <= xb + tol) {
            const double va = p.values[hull[k]], vb = p.values[hull[k + 1]];
            if (xb - xa <= tol) return std::min(va, vb);
            const double t = (y - xa) / (xb - xa);
            return (1.0 - t) * va + t * vb;
        }
    }
    return p.values[hull.back()];
}

double conjugate_lp(const PolyhedralPotential& p, const Vec& y) {
    const int n = p.dim;
    const int cols = p.size();
    const int rows = n + 1;
    std::vector<double> a(static_cast<std::size_t>(rows) * cols);
    for (int j = 0; j < cols; ++j) {
        for (int r = 0; r < n; ++r) a[static_cast<std::size_t>(r) * cols + j] = p.atoms[j][r];
        a[static_cast<std::size_t>(n) * cols + j] = 1.0;
    }
    std::vector<double> b(rows);
    for (int r = 0; r < n; ++r) b[r] = y[r];
    b[n] = 1.0;
    const LpResult res = solve_lp(a, rows, cols, b, p.values);
    return res.feasible ? res.objective : kInfinity;
}

}  // namespace

void validate_potential(const PolyhedralPotential& p) {
    if (p.dim < 1) throw std::invalid_argument("potential: dim must be >= 1");
    if (p.atoms.size() != p.values.size())
        throw std::invalid_argument("potential: atoms/values length mismatch");
    if (static_cast<int>(p.atoms.size()) < p.dim + 1)
        throw std::invalid_argument("potential: need at least dim+1 atoms");
    for (const auto& a : p.atoms) {
        if (static_cast<int>(a.size()) != p.dim)
            throw std::invalid_argument("potential: atom dimension mismatch");
        for (double c : a)
            if (!std::isfinite(c)) throw std::invalid_argument("potential: non-finite atom");
    }
    for (double v : p.values)
        if (!std::isfinite(v)) throw std::invalid_argument("potential: non-finite value");
    for (std::size_t i = 0; i < p.atoms.size(); ++i)
        for (std::size_t j = i + 1; j < p.atoms.size(); ++j) {
            double d = 0.0;
            for (int k = 0; k < p.dim; ++k) d += std::abs(p.atoms[i][k] - p.atoms[j][k]);
            if (d == 0.0) throw std::invalid_argument("potential: duplicate atoms");
        }
}

EvalResult eval(const PolyhedralPotential& p, const Vec& x) {
    double best = -kInfinity;
    int arg = 0;
    for (int i = 0; i < p.size(); ++i) {
        const double s = dot(p.atoms[i], x) - p.values[i];
        if (s > best) {
            best = s;
            arg = i;
        }
    }
    return {best, arg};
}

Vec subgradient(const PolyhedralPotential& p, const Vec& x) {
    return p.atoms[eval(p, x).argmax];
}

double conjugate_at(const PolyhedralPotential& p, const Vec& y) {
    if (p.dim == 1) return conjugate_1d(p, y[0]);
    return conjugate_lp(p, y);
}

std::vector<int> lower_hull_1d(const PolyhedralPotential& p) {
    if (p.dim != 1) throw std::invalid_argument("lower_hull_1d: dimension must be 1");
    return lower_hull_1d_impl(p, kActiveTol * data_scale(p));
}

std::vector<int> active_set(const PolyhedralPotential& p) {
    const double tol = kActiveTol * data_scale(p);
    std::vector<int> act;
    for (int i = 0; i < p.size(); ++i) {
        const double env = conjugate_at(p, p.atoms[i]);
        if (p.values[i] <= env + tol) act.push_back(i);
    }
    return act;
}

PolyhedralPotential apply_gauge(const PolyhedralPotential& p, const GaugeTransform& g) {
    PolyhedralPotential q = p;
    for (int i = 0; i < p.size(); ++i)
        q.values[i] = p.values[i] + dot(p.atoms[i], g.translation) + g.constant;
    return q;
}

namespace {

// Exact recession rate in 2D: with the origin inside the hull, the minimum of
// the support function over unit directions is attained at an edge normal.
double alpha_2d(const std::vector<Vec>& atoms) {
    std::vector<Pt2> pts;
    pts.reserve(atoms.size());
    for (const auto& a : atoms) pts.push_back({a[0], a[1]});
    const Polygon2 hull = convex_hull(pts);
    if (hull.size() < 3) return 0.0;
    double alpha = kInfinity;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Pt2 a = hull[i], b = hull[(i + 1) % hull.size()];
        const Pt2 e = b - a;
        const double len = norm(e);
        if (len == 0.0) continue;
        const Pt2 nrm{e.y / len, -e.x / len};  // outward for CCW hull
        alpha = std::min(alpha, dot(nrm, a));
    }
    return alpha;
}

// Facet enumeration for small instances in dimension >= 3; falls back to
// sampled directions when the subset count is too large.
double alpha_nd(const std::vector<Vec>& atoms, int n, bool& exact) {
    const int m = static_cast<int>(atoms.size());
    double work = 1.0;
    for (int k = 0; k < n; ++k) work *= static_cast<double>(m - k) / (k + 1);
    exact = work * m <= 2e7;

    if (!exact) {
        // Sampled upper estimate of min_theta max_i y_i.theta; adequate for a
        // conservative proposal/tail rate but flagged as inexact.
        Rng rng(0x5eedULL + static_cast<std::uint64_t>(n));
        double best = kInfinity;
        for (int trial = 0; trial < 65536; ++trial) {
            Vec theta(n);
            double s = 0.0;
            for (int k = 0; k < n; ++k) {
                theta[k] = rng.normal();
                s += theta[k] * theta[k];
            }
            s = std::sqrt(s);
            double h = -kInfinity;
            for (const auto& y : atoms) h = std::max(h, dot(y, theta) / s);
            best = std::min(best, h);
        }
        return 0.9 * best;
    }

    std::vector<int> comb(n);
    for (int k = 0; k < n; ++k) comb[k] = k;
    double alpha = kInfinity;
    bool any_facet = false;
    auto process = [&](const std::vector<int>& s) {
        // Hyperplane through the n selected points: normal solves
        // (p_i - p_0) . u = 0; 1-dimensional nullspace generically.
        std::vector<double> mrows(static_cast<std::size_t>(n - 1) * n);
        for (int r = 0; r < n - 1; ++r)
            for (int c = 0; c < n; ++c)
                mrows[static_cast<std::size_t>(r) * n + c] =
                    atoms[s[r + 1]][c] - atoms[s[0]][c];
        // Gaussian elimination to find the nullspace vector.
        std::vector<int> pivot_col(n - 1, -1);
        int rank = 0;
        for (int c = 0; c < n && rank < n - 1; ++c) {
            int pr = -1;
            double mx = 1e-12;
            for (int r = rank; r < n - 1; ++r) {
                const double v = std::abs(mrows[static_cast<std::size_t>(r) * n + c]);
                if (v > mx) {
                    mx = v;
                    pr = r;
                }
            }
            if (pr < 0) continue;
            for (int cc = 0; cc < n; ++cc)
                std::swap(mrows[static_cast<std::size_t>(pr) * n + cc],
                          mrows[static_cast<std::size_t>(rank) * n + cc]);
            const double piv = mrows[static_cast<std::size_t>(rank) * n + c];
            for (int r = 0; r < n - 1; ++r) {
                if (r == rank) continue;
                const double f = mrows[static_cast<std::size_t>(r) * n + c] / piv;
                if (f == 0.0) continue;
                for (int cc = 0; cc < n; ++cc)
                    mrows[static_cast<std::size_t>(r) * n + cc] -=
                        f * mrows[static_cast<std::size_t>(rank) * n + cc];
            }
            pivot_col[rank] = c;
            ++rank;
        }
        if (rank < n - 1) return;  // degenerate subset
        int free_col = -1;
        for (int c = 0; c < n; ++c) {
            bool is_pivot = false;
            for (int r = 0; r < rank; ++r) is_pivot |= (pivot_col[r] == c);
            if (!is_pivot) {
                free_col = c;
                break;
            }
        }
        Vec u(n, 0.0);
        u[free_col] = 1.0;
        for (int r = rank - 1; r >= 0; --r) {
            const int pc = pivot_col[r];
            double acc = mrows[static_cast<std::size_t>(r) * n + free_col];
            u[pc] = -acc / mrows[static_cast<std::size_t>(r) * n + pc];
        }
        const double ulen = norm2(u);
        if (ulen < 1e-12) return;
        for (double& c : u) c /= ulen;
        const double off = dot(u, atoms[s[0]]);
        // Facet test: all atoms on one side.
        double lo = kInfinity, hi = -kInfinity;
        for (const auto& y : atoms) {
            const double d = dot(u, y) - off;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        const double tol = 1e-10 * (1.0 + std::abs(off));
        if (hi <= tol) {
            alpha = std::min(alpha, off);
            any_facet = true;
        } else if (lo >= -tol) {
            alpha = std::min(alpha, -off);
            any_facet = true;
        }
    };

    while (true) {
        process(comb);
        int k = n - 1;
        while (k >= 0 && comb[k] == m - n + k) --k;
        if (k < 0) break;
        ++comb[k];
        for (int j = k + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
    }
    return any_facet ? alpha : 0.0;
}

}  // namespace

IntegrabilityWitness check_integrability(const PolyhedralPotential& p) {
    IntegrabilityWitness w;
    w.beta = *std::max_element(p.values.begin(), p.values.end());
    if (p.dim == 1) {
        double mx = -kInfinity, mn = kInfinity;
        for (const auto& a : p.atoms) {
            mx = std::max(mx, a[0]);
            mn = std::min(mn, a[0]);
        }
        w.alpha = std::min(mx, -mn);
    } else if (p.dim == 2) {
        w.alpha = alpha_2d(p.atoms);
    } else {
        w.alpha = alpha_nd(p.atoms, p.dim, w.exact);
    }
    w.integrable = w.alpha > 0.0;
    return w;
}

}  // namespace moments
