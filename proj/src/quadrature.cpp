#include "moments/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace moments {

namespace {

constexpr double kSeriesSpread = 0.25;

double factorial(int k) {
    static const auto table = [] {
        std::array<double, 64> f{};
        f[0] = 1.0;
        for (int i = 1; i < 64; ++i) f[i] = f[i - 1] * i;
        return f;
    }();
    return table[static_cast<std::size_t>(k)];
}

// Series around the node mean: dd_k[exp] = e^c * sum_j h_j(delta)/(j+k)! with
// h_j the complete homogeneous symmetric polynomials of the offsets.
double dd_exp_series(const double* u, int order) {
    const int cnt = order + 1;
    double c = 0.0;
    for (int i = 0; i < cnt; ++i) c += u[i];
    c /= cnt;
    constexpr int kMaxTerms = 40;
    std::array<double, kMaxTerms + 1> h{};
    h[0] = 1.0;
    for (int i = 0; i < cnt; ++i) {
        const double d = u[i] - c;
        for (int j = 1; j <= kMaxTerms; ++j) h[j] += d * h[j - 1];
    }
    double sum = 0.0;
    for (int j = kMaxTerms; j >= 0; --j) sum += h[j] / factorial(j + order);
    return std::exp(c) * sum;
}

double dd_exp_sorted(const double* u, int order) {
    if (order == 0) return std::exp(u[0]);
    if (u[order] - u[0] < kSeriesSpread) return dd_exp_series(u, order);
    return (dd_exp_sorted(u + 1, order - 1) - dd_exp_sorted(u, order - 1)) /
           (u[order] - u[0]);
}

double dd_exp(std::array<double, 4>& nodes, int count) {
    std::sort(nodes.begin(), nodes.begin() + count);
    return dd_exp_sorted(nodes.data(), count - 1);
}

}  // namespace

double exp_divided_difference(std::span<const double> nodes) {
    std::vector<double> u(nodes.begin(), nodes.end());
    std::sort(u.begin(), u.end());
    return dd_exp_sorted(u.data(), static_cast<int>(u.size()) - 1);
}

double exp_affine_polygon(const Polygon2& poly, Pt2 a, double b) {
    const std::size_t n = poly.size();
    if (n < 3) return 0.0;
    const Pt2 p0 = poly[0];
    const double t0 = b - dot(a, p0);
    double sum = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const Pt2 p1 = poly[k], p2 = poly[k + 1];
        std::array<double, 4> t{t0, b - dot(a, p1), b - dot(a, p2), 0.0};
        const double two_area = cross(p1 - p0, p2 - p0);
        if (two_area == 0.0) continue;
        sum += two_area * dd_exp(t, 3);
    }
    return sum;
}

Pt2 exp_affine_polygon_moment(const Polygon2& poly, Pt2 a, double b) {
    const std::size_t n = poly.size();
    Pt2 m{0.0, 0.0};
    if (n < 3) return m;
    const Pt2 p0 = poly[0];
    const double t0 = b - dot(a, p0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const Pt2 p1 = poly[k], p2 = poly[k + 1];
        const double two_area = cross(p1 - p0, p2 - p0);
        if (two_area == 0.0) continue;
        const double t1 = b - dot(a, p1), t2 = b - dot(a, p2);
        // integral over the triangle of lambda_j e^{t} = 2T * dd over the node
        // multiset with t_j doubled.
        std::array<double, 4> n0{t0, t0, t1, t2};
        std::array<double, 4> n1{t1, t1, t0, t2};
        std::array<double, 4> n2{t2, t2, t0, t1};
        const double w0 = dd_exp(n0, 4), w1 = dd_exp(n1, 4), w2 = dd_exp(n2, 4);
        m = m + two_area * (w0 * p0 + w1 * p1 + w2 * p2);
    }
    return m;
}

void require_convergent_rays(const Cell& cell, Pt2 a) {
    for (const Pt2& r : cell.rays)
        if (dot(a, r) <= 0.0)
            throw std::domain_error("exp_affine: divergent recession direction");
}

double tail_bound(const IntegrabilityWitness& w, int dim, double radius) {
    if (!(w.alpha > 0.0)) throw std::domain_error("tail_bound: alpha <= 0");
    const int n = dim;
    const double kappa =
        std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
    double poly = 0.0;
    const double ar = w.alpha * radius;
    for (int k = 0; k < n; ++k) poly += std::pow(ar, k) / factorial(k);
    return std::exp(w.beta - ar) * n * kappa * factorial(n - 1) *
           std::pow(w.alpha, -n) * poly;
}

double tail_bound(const PolyhedralPotential& p, double radius) {
    return tail_bound(check_integrability(p), p.dim, radius);
}

double tail_moment_bound(const IntegrabilityWitness& w, int dim, double radius) {
    if (!(w.alpha > 0.0)) throw std::domain_error("tail_moment_bound: alpha <= 0");
    const int n = dim;
    const double kappa =
        std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
    double poly = 0.0;
    const double ar = w.alpha * radius;
    for (int k = 0; k <= n; ++k) poly += std::pow(ar, k) / factorial(k);
    return std::exp(w.beta - ar) * n * kappa * factorial(n) *
           std::pow(w.alpha, -(n + 1)) * poly;
}

double choose_truncation_radius(const PolyhedralPotential& p,
                                const IntegrabilityWitness& w, const RPolicy& policy) {
    if (policy.fixed_radius > 0.0) return policy.fixed_radius;
    // Crude lower bound on Z: a ball around the origin where psi is close to
    // psi(0); psi has Lipschitz constant max |y_i|.
    double lip = 0.0;
    for (const auto& a : p.atoms) lip = std::max(lip, norm2(a));
    lip = std::max(lip, 1e-9);
    const double psi0 = eval(p, Vec(p.dim, 0.0)).value;
    const double r = 1.0 / lip;
    const double kappa =
        std::pow(std::numbers::pi, 0.5 * p.dim) / std::tgamma(0.5 * p.dim + 1.0);
    const double z_low = kappa * std::pow(r, p.dim) * std::exp(-psi0 - 1.0);
    const double target = policy.rel_tol * z_low;

    double radius = std::max(1.0, (w.beta + 10.0) / w.alpha);
    int guard = 0;
    while (tail_bound(w, p.dim, radius) > target && guard++ < 400) radius *= 1.25;
    return radius;
}

MassResult exact_masses_2d(const PolyhedralPotential& p, const CellDecomposition& cells,
                           const RPolicy& policy, int threads) {
    if (p.dim != 2) throw std::invalid_argument("exact_masses_2d: dimension must be 2");
    const IntegrabilityWitness w = check_integrability(p);
    if (!w.integrable) throw std::domain_error("exact_masses_2d: not integrable");
    const double radius = choose_truncation_radius(p, w, policy);

    const std::size_t n = cells.cells.size();
    MassResult res;
    res.exact = true;
    res.radius = radius;
    res.masses.assign(n, 0.0);
    res.cell_moments.assign(n, Vec(2, 0.0));
    parallel_for(n, threads, [&](std::size_t i) {
        const Cell& cell = cells.cells[i];
        if (cell.empty) return;
        const Pt2 a{p.atoms[i][0], p.atoms[i][1]};
        require_convergent_rays(cell, a);
        const Polygon2 poly = clip_cell(cell, radius);
        if (poly.size() < 3) return;
        res.masses[i] = exp_affine_polygon(poly, a, p.values[i]);
        const Pt2 m = exp_affine_polygon_moment(poly, a, p.values[i]);
        res.cell_moments[i] = {m.x, m.y};
    });

    const double tail = tail_bound(w, 2, radius);
    const double tail_m = tail_moment_bound(w, 2, radius);
    res.first_moment.assign(2, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        res.total += res.masses[i];
        res.first_moment[0] += res.cell_moments[i][0];
        res.first_moment[1] += res.cell_moments[i][1];
    }
    res.mass_errors.assign(n, tail + 1e-15 * res.total);
    res.total_error = tail + 4e-16 * res.total * static_cast<double>(n);
    res.first_moment_error.assign(2, tail_m + 1e-15 * (std::abs(res.first_moment[0]) +
                                                       std::abs(res.first_moment[1])));
    return res;
}

namespace {

// Closed-form integral of e^{-(y x - v)} over [a, b]; a may be -inf, b +inf.
double interval_mass(double y, double v, double a, double b) {
    if (b <= a) return 0.0;
    if (y == 0.0) {
        if (!std::isfinite(a) || !std::isfinite(b)) return kInfinity;
        return std::exp(v) * (b - a);
    }
    if (!std::isfinite(a)) return std::exp(v - y * b) / (-y);  // requires y < 0
    if (!std::isfinite(b)) return std::exp(v - y * a) / y;     // requires y > 0
    const double len = b - a;
    const double d = y * len;
    const double g = d == 0.0 ? 1.0 : -std::expm1(-d) / d;
    return std::exp(v - y * a) * len * g;
}

// Closed-form integral of x e^{-(y x - v)} over [a, b].
double interval_moment(double y, double v, double a, double b) {
    if (b <= a) return 0.0;
    if (y == 0.0) return std::exp(v) * 0.5 * (b * b - a * a);
    auto anti = [&](double x) {  // antiderivative, vanishing at the infinite end
        return -std::exp(v - y * x) * (x / y + 1.0 / (y * y));
    };
    if (!std::isfinite(a)) return anti(b);            // y < 0: limit at -inf is 0
    if (!std::isfinite(b)) return -anti(a);           // y > 0: limit at +inf is 0
    const double len = b - a;
    const double d = -y * len;
    // Moment via divided differences of exp: stable when |y len| is small.
    std::array<double, 4> n1{0.0, d, 0.0, 0.0};
    std::array<double, 4> n2{0.0, d, d, 0.0};
    const double g1 = dd_exp(n1, 2);  // (e^d - 1)/d analogue
    const double g2 = dd_exp(n2, 3);
    return std::exp(v - y * a) * len * (a * g1 + len * g2);
}

}  // namespace

MassResult exact_masses_1d(const PolyhedralPotential& p) {
    if (p.dim != 1) throw std::invalid_argument("exact_masses_1d: dimension must be 1");
    const IntegrabilityWitness w = check_integrability(p);
    if (!w.integrable) throw std::domain_error("exact_masses_1d: not integrable");

    const std::vector<int> hull = lower_hull_1d(p);
    const std::size_t k = hull.size();
    std::vector<double> breaks(k + 1);
    breaks[0] = -kInfinity;
    breaks[k] = kInfinity;
    for (std::size_t j = 1; j < k; ++j) {
        const int i0 = hull[j - 1], i1 = hull[j];
        breaks[j] = (p.values[i1] - p.values[i0]) / (p.atoms[i1][0] - p.atoms[i0][0]);
        breaks[j] = std::max(breaks[j], breaks[j - 1]);
    }

    MassResult res;
    res.exact = true;
    res.masses.assign(p.size(), 0.0);
    res.cell_moments.assign(p.size(), Vec(1, 0.0));
    res.first_moment.assign(1, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        const int i = hull[j];
        const double y = p.atoms[i][0], v = p.values[i];
        res.masses[i] = interval_mass(y, v, breaks[j], breaks[j + 1]);
        res.cell_moments[i][0] = interval_moment(y, v, breaks[j], breaks[j + 1]);
        res.total += res.masses[i];
        res.first_moment[0] += res.cell_moments[i][0];
    }
    res.mass_errors.assign(p.size(), 1e-15 * res.total);
    res.total_error = 1e-15 * res.total * static_cast<double>(k);
    res.first_moment_error.assign(1, 1e-14 * (1.0 + std::abs(res.first_moment[0])));
    return res;
}

MassResult exact_masses(const PolyhedralPotential& p, const RPolicy& policy, int threads) {
    if (p.dim == 1) return exact_masses_1d(p);
    if (p.dim == 2) {
        const CellDecomposition cells = build_cells(p, threads);
        return exact_masses_2d(p, cells, policy, threads);
    }
    throw std::invalid_argument("exact_masses: exact path supports dimensions 1 and 2");
}

MassResult mc_masses(const PolyhedralPotential& p, const McOptions& opt) {
    const IntegrabilityWitness w = check_integrability(p);
    if (!w.integrable) throw std::domain_error("mc_masses: not integrable");
    const double rate = opt.proposal_rate > 0.0 ? opt.proposal_rate : 0.5 * w.alpha;
    const int n = p.dim;
    const int atoms = p.size();
    const double log_q0 = n * std::log(0.5 * rate);

    constexpr std::size_t kBlock = 1 << 16;
    const std::size_t nblocks = (opt.samples + kBlock - 1) / kBlock;

    struct BlockAcc {
        std::vector<double> s, ss;
        Vec mx, mxx;
        double wsum = 0.0, wsq = 0.0, wmax = 0.0;
    };
    std::vector<BlockAcc> acc(nblocks);

    parallel_for(nblocks, opt.threads, [&](std::size_t blk) {
        BlockAcc a;
        a.s.assign(atoms, 0.0);
        a.ss.assign(atoms, 0.0);
        a.mx.assign(n, 0.0);
        a.mxx.assign(n, 0.0);
        Rng rng(mix_seed(opt.seed, blk));
        const std::size_t lo = blk * kBlock;
        const std::size_t hi = std::min(opt.samples, lo + kBlock);
        Vec x(n);
        for (std::size_t s = lo; s < hi; ++s) {
            double l1 = 0.0;
            for (int kdim = 0; kdim < n; ++kdim) {
                const double u = std::max(rng.uniform(), 1e-300);
                x[kdim] = u < 0.5 ? std::log(2.0 * u) / rate
                                  : -std::log(2.0 * (1.0 - u)) / rate;
                l1 += std::abs(x[kdim]);
            }
            const EvalResult e = eval(p, x);
            const double wgt = std::exp(-e.value - (log_q0 - rate * l1));
            a.s[e.argmax] += wgt;
            a.ss[e.argmax] += wgt * wgt;
            a.wsum += wgt;
            a.wsq += wgt * wgt;
            a.wmax = std::max(a.wmax, wgt);
            for (int kdim = 0; kdim < n; ++kdim) {
                a.mx[kdim] += wgt * x[kdim];
                a.mxx[kdim] += wgt * wgt * x[kdim] * x[kdim];
            }
        }
        acc[blk] = std::move(a);
    });

    const double nn = static_cast<double>(opt.samples);
    MassResult res;
    res.exact = false;
    res.masses.assign(atoms, 0.0);
    res.mass_errors.assign(atoms, 0.0);
    res.first_moment.assign(n, 0.0);
    res.first_moment_error.assign(n, 0.0);
    std::vector<double> ss(atoms, 0.0);
    Vec mxx(n, 0.0);
    double wsum = 0.0, wsq = 0.0;
    for (const auto& a : acc) {
        for (int i = 0; i < atoms; ++i) {
            res.masses[i] += a.s[i];
            ss[i] += a.ss[i];
        }
        for (int kdim = 0; kdim < n; ++kdim) {
            res.first_moment[kdim] += a.mx[kdim];
            mxx[kdim] += a.mxx[kdim];
        }
        wsum += a.wsum;
        wsq += a.wsq;
    }
    const double mean_w = wsum / nn;
    const double var_w = std::max(0.0, wsq / nn - mean_w * mean_w);
    if (mean_w > 0.0 && var_w / (mean_w * mean_w) > opt.explosion_threshold)
        throw std::domain_error(
            "mc_masses: importance weight variance explosion; "
            "use a heavier-tailed proposal (smaller rate)");

    for (int i = 0; i < atoms; ++i) {
        const double m = res.masses[i] / nn;
        const double var = std::max(0.0, ss[i] / nn - m * m);
        res.masses[i] = m;
        res.mass_errors[i] = std::sqrt(var / nn);
        res.total += m;
    }
    res.total_error = std::sqrt(std::max(0.0, wsq / nn - mean_w * mean_w) / nn);
    for (int kdim = 0; kdim < n; ++kdim) {
        const double m = res.first_moment[kdim] / nn;
        res.first_moment[kdim] = m;
        res.first_moment_error[kdim] =
            std::sqrt(std::max(0.0, mxx[kdim] / nn - m * m) / nn);
    }
    return res;
}

}  // namespace moments
