#include "moments/forward.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace moments {

namespace {

void finalize_barycenter(MomentMeasureEstimate& m) {
    m.barycenter.assign(m.dim, 0.0);
    m.barycenter_se.assign(m.dim, 0.0);
    for (int k = 0; k < m.dim; ++k) {
        const int kk = k;
        const Statistic s =
            weighted_stat(m, [kk](const double* pt) { return pt[kk]; });
        m.barycenter[k] = s.value;
        m.barycenter_se[k] = s.se;
    }
}

}  // namespace

Statistic weighted_stat(const MomentMeasureEstimate& m,
                        const std::function<double(const double*)>& g) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        mean += m.weights[i] * g(&m.coords[i * static_cast<std::size_t>(m.dim)]);
    double var = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double d = g(&m.coords[i * static_cast<std::size_t>(m.dim)]) - mean;
        var += m.weights[i] * m.weights[i] * d * d;
    }
    return {mean, std::sqrt(var)};
}

namespace {

MomentMeasureEstimate estimate_from_masses(const PolyhedralPotential& p,
                                           const MassResult& mr) {
    MomentMeasureEstimate m;
    m.dim = p.dim;
    m.exact = mr.exact;
    m.total = 1.0;
    m.weights.resize(mr.masses.size());
    m.coords.reserve(mr.masses.size() * static_cast<std::size_t>(p.dim));
    for (std::size_t i = 0; i < mr.masses.size(); ++i) {
        m.weights[i] = mr.masses[i] / mr.total;
        for (int k = 0; k < p.dim; ++k) m.coords.push_back(p.atoms[i][k]);
    }
    finalize_barycenter(m);
    if (!mr.exact) {
        for (int k = 0; k < p.dim; ++k)
            m.barycenter_se[k] = std::max(m.barycenter_se[k],
                                          mr.first_moment_error[k] / mr.total);
    }
    return m;
}

}  // namespace

MomentMeasureEstimate moment_measure_polyhedral(const PolyhedralPotential& p,
                                                const RPolicy& policy, int threads) {
    if (p.dim <= 2) return estimate_from_masses(p, exact_masses(p, policy, threads));
    McOptions opt;
    opt.samples = 1 << 20;
    opt.seed = 0x9e3779b9ULL;
    opt.threads = threads;
    return estimate_from_masses(p, mc_masses(p, opt));
}

MomentMeasureEstimate moment_measure_polyhedral_mc(const PolyhedralPotential& p,
                                                   const McOptions& opt) {
    return estimate_from_masses(p, mc_masses(p, opt));
}

MomentMeasureEstimate moment_measure_sampled(const AnalyticPotential& a,
                                             std::size_t samples, std::uint64_t seed,
                                             int threads) {
    const int n = a.dim;
    const double rate = 0.5 * std::max(a.growth_rate, 1e-9);
    const double log_q0 = n * std::log(0.5 * rate);

    constexpr std::size_t kBlock = 1 << 16;
    const std::size_t nblocks = (samples + kBlock - 1) / kBlock;
    struct Block {
        std::vector<double> coords;
        std::vector<double> w;
    };
    std::vector<Block> blocks(nblocks);
    parallel_for(nblocks, threads, [&](std::size_t blk) {
        Rng rng(mix_seed(seed, blk));
        const std::size_t lo = blk * kBlock;
        const std::size_t hi = std::min(samples, lo + kBlock);
        Block b;
        b.coords.reserve((hi - lo) * static_cast<std::size_t>(n));
        b.w.reserve(hi - lo);
        Vec x(n);
        for (std::size_t s = lo; s < hi; ++s) {
            double l1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double u = std::max(rng.uniform(), 1e-300);
                x[k] = u < 0.5 ? std::log(2.0 * u) / rate
                               : -std::log(2.0 * (1.0 - u)) / rate;
                l1 += std::abs(x[k]);
            }
            const double wgt = std::exp(-a.psi(x) - (log_q0 - rate * l1));
            const Vec y = a.grad(x);
            for (int k = 0; k < n; ++k) b.coords.push_back(y[k]);
            b.w.push_back(wgt);
        }
        blocks[blk] = std::move(b);
    });

    MomentMeasureEstimate m;
    m.dim = n;
    m.exact = false;
    m.total = 1.0;
    double wsum = 0.0, wsq = 0.0, wmax = 0.0;
    for (const auto& b : blocks)
        for (double w : b.w) {
            wsum += w;
            wsq += w * w;
            wmax = std::max(wmax, w);
        }
    if (!(wsum > 0.0) || !std::isfinite(wsum))
        throw std::domain_error("moment_measure_sampled: degenerate importance weights");
    const double nn = static_cast<double>(samples);
    const double mean_w = wsum / nn;
    const double cov2 = wsq / nn / (mean_w * mean_w) - 1.0;
    if (cov2 > 1e6)
        throw std::domain_error(
            "moment_measure_sampled: importance weight variance explosion; "
            "use a heavier-tailed proposal");
    m.coords.reserve(samples * static_cast<std::size_t>(n));
    m.weights.reserve(samples);
    for (const auto& b : blocks) {
        m.coords.insert(m.coords.end(), b.coords.begin(), b.coords.end());
        for (double w : b.w) m.weights.push_back(w / wsum);
    }
    finalize_barycenter(m);
    return m;
}

ValidationReport necessary_conditions_report(const MomentMeasureEstimate& m) {
    DiscreteMeasure mu;
    mu.dim = m.dim;
    mu.atoms.reserve(m.size());
    mu.weights.reserve(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.weights[i] <= 0.0) continue;  // drop inactive exact atoms
        mu.atoms.push_back(m.point(i));
        mu.weights.push_back(m.weights[i]);
    }
    double se = 0.0;
    for (double s : m.barycenter_se) se += s * s;
    const double tol = std::max(kDefaultValidateTol, 4.0 * std::sqrt(se));
    return validate(mu, tol);
}

MomentMeasureEstimate surface_variant(const MomentMeasureEstimate& m) {
    MomentMeasureEstimate v = m;
    const Statistic total = weighted_stat(m, [&](const double* pt) {
        double s = 0.0;
        for (int k = 0; k < m.dim; ++k) s += pt[k] * pt[k];
        return std::sqrt(s);
    });
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double s = 0.0;
        const double* pt = &m.coords[i * static_cast<std::size_t>(m.dim)];
        for (int k = 0; k < m.dim; ++k) s += pt[k] * pt[k];
        v.weights[i] = m.weights[i] * std::sqrt(s);
        sum += v.weights[i];
    }
    if (sum > 0.0)
        for (double& w : v.weights) w /= sum;
    v.total = m.total * total.value;
    finalize_barycenter(v);
    return v;
}

double one_dim_identity_residual(const AnalyticPotential& psi,
                                 const std::function<double(double)>& tail_moment,
                                 const std::vector<double>& grid, double branch_lo) {
    if (psi.dim != 1)
        throw std::invalid_argument("one_dim_identity_residual: dimension must be 1");
    auto f = [&](double x) { return psi.psi({x}); };

    // The increasing branch must actually increase.
    double prev = f(branch_lo);
    for (int k = 1; k <= 64; ++k) {
        const double x = branch_lo + k * 0.25;
        const double cur = f(x);
        if (cur < prev - 1e-12)
            throw std::domain_error("one_dim_identity_residual: non-monotone branch");
        prev = cur;
    }

    auto invert = [&](double s) {
        double lo = branch_lo, hi = branch_lo + 1.0;
        int guard = 0;
        while (f(hi) < s && guard++ < 200) hi = branch_lo + 2.0 * (hi - branch_lo);
        if (f(branch_lo) > s)
            throw std::domain_error("one_dim_identity_residual: value below branch range");
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (f(mid) < s)
                lo = mid;
            else
                hi = mid;
            if (hi - lo < 1e-15 * (1.0 + std::abs(hi))) break;
        }
        return 0.5 * (lo + hi);
    };

    double worst = 0.0;
    for (double y : grid) {
        const double tm = tail_moment(y);
        if (!(tm > 0.0)) throw std::domain_error("one_dim_identity_residual: empty tail");
        const double s = -std::log(tm);
        // Central differences at two scales, Richardson-extrapolated.
        const double h = 1e-4 * std::max(1.0, std::abs(s));
        const double d1 = (invert(s + h) - invert(s - h)) / (2.0 * h);
        const double d2 = (invert(s + 0.5 * h) - invert(s - 0.5 * h)) / h;
        const double lhs = (4.0 * d2 - d1) / 3.0;
        worst = std::max(worst, std::abs(lhs - 1.0 / y));
    }
    return worst;
}

AnalyticPotential gaussian_potential(int dim) {
    AnalyticPotential a;
    a.dim = dim;
    a.name = "gaussian";
    a.psi = [](const Vec& x) { return 0.5 * dot(x, x); };
    a.grad = [](const Vec& x) { return x; };
    a.growth_rate = 1.0;
    return a;
}

AnalyticPotential cube_potential(int dim) {
    AnalyticPotential a;
    a.dim = dim;
    a.name = "cube";
    a.psi = [](const Vec& x) {
        double s = 0.0;
        for (double c : x) s += 2.0 * std::log(std::cosh(0.5 * c));
        return s;
    };
    a.grad = [](const Vec& x) {
        Vec g(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) g[k] = std::tanh(0.5 * x[k]);
        return g;
    };
    a.growth_rate = 1.0;
    return a;
}

AnalyticPotential norm_potential(int dim) {
    AnalyticPotential a;
    a.dim = dim;
    a.name = "sphere";
    a.psi = [](const Vec& x) { return norm2(x); };
    a.grad = [](const Vec& x) {
        const double r = std::max(norm2(x), 1e-300);
        Vec g(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) g[k] = x[k] / r;
        return g;
    };
    a.growth_rate = 1.0;
    return a;
}

AnalyticPotential simplex_potential(int dim) {
    const DiscreteMeasure verts = simplex_vertices(dim);
    AnalyticPotential a;
    a.dim = dim;
    a.name = "simplex";
    const double np1 = dim + 1;
    const auto vs = verts.atoms;
    a.psi = [vs, np1](const Vec& x) {
        double mx = -kInfinity;
        std::vector<double> e(vs.size());
        for (std::size_t i = 0; i < vs.size(); ++i) {
            e[i] = dot(x, vs[i]) / np1;
            mx = std::max(mx, e[i]);
        }
        double s = 0.0;
        for (double v : e) s += std::exp(v - mx);
        return np1 * (mx + std::log(s));
    };
    a.grad = [vs, np1](const Vec& x) {
        double mx = -kInfinity;
        std::vector<double> e(vs.size());
        for (std::size_t i = 0; i < vs.size(); ++i) {
            e[i] = dot(x, vs[i]) / np1;
            mx = std::max(mx, e[i]);
        }
        double s = 0.0;
        for (double& v : e) {
            v = std::exp(v - mx);
            s += v;
        }
        Vec g(x.size(), 0.0);
        for (std::size_t i = 0; i < vs.size(); ++i)
            for (std::size_t k = 0; k < x.size(); ++k) g[k] += (e[i] / s) * vs[i][k];
        return g;
    };
    // Recession rate: inradius of the regular simplex with unit vertices.
    a.growth_rate = 1.0 / dim;
    return a;
}

AnalyticPotential linear_image_potential(const AnalyticPotential& base,
                                         const std::vector<Vec>& t_matrix) {
    AnalyticPotential a;
    a.dim = base.dim;
    a.name = base.name + "-linear-image";
    const int n = base.dim;
    auto apply = [t_matrix, n](const Vec& x) {
        Vec y(n, 0.0);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) y[r] += t_matrix[r][c] * x[c];
        return y;
    };
    a.psi = [base, apply](const Vec& x) { return base.psi(apply(x)); };
    a.grad = [base, apply, t_matrix, n](const Vec& x) {
        const Vec g = base.grad(apply(x));
        Vec out(n, 0.0);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) out[r] += t_matrix[c][r] * g[c];
        return out;
    };
    // psi(Tx) >= alpha_base |Tx| - beta >= alpha_base sigma_min(T) |x| - beta.
    Eigen::MatrixXd t(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) t(r, c) = t_matrix[r][c];
    const double smin = t.jacobiSvd().singularValues()(n - 1);
    a.growth_rate = base.growth_rate * std::max(smin, 1e-6);
    return a;
}

}  // namespace moments
