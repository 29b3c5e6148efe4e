#include "moments/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

namespace moments {

namespace {

DiscreteMeasure normalized(const DiscreteMeasure& mu) {
    DiscreteMeasure p = mu;
    const double w = mu.total_mass();
    for (double& x : p.weights) x /= w;
    return p;
}

PolyhedralPotential potential_from(const DiscreteMeasure& mu, const Vec& v) {
    PolyhedralPotential p;
    p.dim = mu.dim;
    p.atoms = mu.atoms;
    p.values = v;
    return p;
}

MassResult evaluate_masses(const DiscreteMeasure& mu, const Vec& v,
                           const SolverConfig& cfg, std::uint64_t iter) {
    const PolyhedralPotential p = potential_from(mu, v);
    if (!cfg.use_mc && p.dim <= 2) return exact_masses(p, cfg.r_policy, cfg.threads);
    McOptions opt;
    opt.samples = cfg.mc_samples;
    // Common random numbers across all evaluations within one iteration keep
    // line-search comparisons meaningful under noise.
    opt.seed = mix_seed(cfg.seed, iter);
    opt.threads = cfg.threads;
    return mc_masses(p, opt);
}

struct Evaluation {
    double objective;
    Vec grad;
    MassResult masses;
};

Evaluation evaluate(const DiscreteMeasure& mu, const Vec& v, const SolverConfig& cfg,
                    std::uint64_t iter) {
    Evaluation e{0.0, Vec(mu.atoms.size(), 0.0), evaluate_masses(mu, v, cfg, iter)};
    e.objective = std::log(e.masses.total) - dot(mu.weights, v);
    for (std::size_t i = 0; i < mu.atoms.size(); ++i)
        e.grad[i] = e.masses.masses[i] / e.masses.total - mu.weights[i];
    return e;
}

// Orthonormal basis of the translation-gauge span {(y_i . e_k)_i : k}.
std::vector<Vec> gauge_basis(const DiscreteMeasure& mu) {
    const int n = mu.dim;
    const std::size_t m = mu.atoms.size();
    std::vector<Vec> basis;
    for (int k = 0; k < n; ++k) {
        Vec u(m);
        for (std::size_t i = 0; i < m; ++i) u[i] = mu.atoms[i][k];
        for (const Vec& q : basis) {
            const double c = dot(q, u);
            for (std::size_t i = 0; i < m; ++i) u[i] -= c * q[i];
        }
        const double nr = norm2(u);
        if (nr > 1e-12) {
            for (double& x : u) x /= nr;
            basis.push_back(std::move(u));
        }
    }
    return basis;
}

void project_gauge(Vec& v, const DiscreteMeasure& mu, const std::vector<Vec>& basis) {
    double s = dot(mu.weights, v);
    for (double& x : v) x -= s;
    for (const Vec& q : basis) {
        const double c = dot(q, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
    }
    s = dot(mu.weights, v);
    for (double& x : v) x -= s;
}

}  // namespace

void require_valid(const DiscreteMeasure& mu, double tol) {
    const ValidationReport rep = validate(mu, tol);
    if (!rep.mass_ok)
        throw std::invalid_argument(
            "measure fails condition (i): total mass must be finite and positive");
    if (!rep.span_ok)
        throw std::invalid_argument(
            "measure fails condition (ii): atoms are supported in a "
            "lower-dimensional subspace");
    if (!rep.barycenter_ok)
        throw std::invalid_argument(
            "measure fails condition (iii): barycenter is not at the origin");
}

double objective(const DiscreteMeasure& mu, const Vec& v, const SolverConfig& cfg) {
    return evaluate(normalized(mu), v, cfg, 0).objective;
}

Vec gradient(const DiscreteMeasure& mu, const Vec& v, const SolverConfig& cfg) {
    return evaluate(normalized(mu), v, cfg, 0).grad;
}

std::pair<PolyhedralPotential, SolveReport> solve(const DiscreteMeasure& mu_in,
                                                  const SolverConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    require_valid(mu_in);
    const DiscreteMeasure mu = normalized(mu_in);
    const std::size_t m = mu.atoms.size();
    const std::vector<Vec> basis = gauge_basis(mu);

    Vec v = cfg.initial_values.empty() ? Vec(m, 0.0) : cfg.initial_values;
    if (v.size() != m) throw std::invalid_argument("solve: initial_values size mismatch");
    project_gauge(v, mu, basis);

    SolveReport report;
    Evaluation cur = evaluate(mu, v, cfg, 0);

    // Curvature pairs for the minimization of -I: s = dv, yf = -(dg).
    std::deque<std::pair<Vec, Vec>> pairs;
    auto two_loop = [&](const Vec& g) {
        Vec q(m);
        for (std::size_t i = 0; i < m; ++i) q[i] = -g[i];  // grad of -I
        std::vector<double> alpha(pairs.size());
        for (std::size_t k = pairs.size(); k-- > 0;) {
            const auto& [s, yf] = pairs[k];
            const double rho = 1.0 / dot(yf, s);
            alpha[k] = rho * dot(s, q);
            for (std::size_t i = 0; i < m; ++i) q[i] -= alpha[k] * yf[i];
        }
        if (!pairs.empty()) {
            const auto& [s, yf] = pairs.back();
            const double gamma = dot(s, yf) / dot(yf, yf);
            for (double& x : q) x *= gamma;
        }
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto& [s, yf] = pairs[k];
            const double rho = 1.0 / dot(yf, s);
            const double beta = rho * dot(yf, q);
            for (std::size_t i = 0; i < m; ++i) q[i] += (alpha[k] - beta) * s[i];
        }
        Vec d(m);
        for (std::size_t i = 0; i < m; ++i) d[i] = -q[i];  // ascent direction
        return d;
    };

    // With MC quadrature the achievable tolerance is floored by the noise.
    auto noise_floor = [&](const Evaluation& e) {
        if (e.masses.exact) return 0.0;
        double f = 0.0;
        for (double se : e.masses.mass_errors) f = std::max(f, se);
        return 4.0 * f / e.masses.total;
    };

    bool converged = false;
    int iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        const double gnorm = norm_inf(cur.grad);
        report.objective_trace.push_back(cur.objective);
        report.grad_norm_trace.push_back(gnorm);
        if (gnorm <= std::max(cfg.gradient_tol, noise_floor(cur))) {
            converged = true;
            break;
        }

        Vec d = two_loop(cur.grad);
        double dg = dot(d, cur.grad);
        if (!(dg > 0.0)) {  // not an ascent direction: reset memory
            pairs.clear();
            d = cur.grad;
            dg = dot(d, d);
        }

        const std::uint64_t ls_seed = static_cast<std::uint64_t>(iter) + 1;
        double step = 1.0;
        Vec v_try;
        Evaluation next = cur;
        bool accepted = false;
        Vec best_v;
        Evaluation best;
        bool have_best = false;
        const double slack = 1e-13 * (1.0 + std::abs(cur.objective));
        for (int back = 0; back < 80; ++back) {
            v_try = v;
            for (std::size_t i = 0; i < m; ++i) v_try[i] += step * d[i];
            project_gauge(v_try, mu, basis);
            Evaluation cand = evaluate(mu, v_try, cfg, ls_seed);
            if (!std::isfinite(cand.objective)) {
                step *= cfg.ls_backtrack;
                continue;
            }
            const bool armijo =
                cand.objective >= cur.objective + cfg.ls_sufficient * step * dg;
            // Once the objective gain falls under the floating point
            // resolution, fall back to the curvature condition: the
            // directional derivative must have been at least halved.
            const bool wolfe = cand.objective >= cur.objective - slack &&
                               std::abs(dot(cand.grad, d)) <= 0.5 * dg;
            if (armijo || wolfe) {
                next = std::move(cand);
                accepted = true;
                break;
            }
            if (!have_best || cand.objective > best.objective) {
                best = std::move(cand);
                best_v = v_try;
                have_best = true;
            }
            step *= cfg.ls_backtrack;
        }
        if (!accepted) {
            // Last resort: a step that does not measurably decrease the
            // objective but still shrinks the gradient.
            if (have_best && best.objective >= cur.objective - slack &&
                norm_inf(best.grad) < 0.97 * gnorm) {
                next = std::move(best);
                v_try = std::move(best_v);
                accepted = true;
            }
        }
        if (!accepted) break;  // no ascent left at machine scale

        Vec s(m), yf(m);
        for (std::size_t i = 0; i < m; ++i) {
            s[i] = v_try[i] - v[i];
            yf[i] = -(next.grad[i] - cur.grad[i]);
        }
        const double sy = dot(s, yf);
        if (sy > 1e-14 * norm2(s) * norm2(yf)) {
            pairs.emplace_back(std::move(s), std::move(yf));
            while (static_cast<int>(pairs.size()) > cfg.memory) pairs.pop_front();
        }
        v = std::move(v_try);
        cur = std::move(next);
    }

    report.iterations = iter;
    report.converged = converged;
    report.final_objective = cur.objective;
    report.final_grad_norm = norm_inf(cur.grad);
    if (report.objective_trace.empty() ||
        report.objective_trace.back() != cur.objective) {
        report.objective_trace.push_back(cur.objective);
        report.grad_norm_trace.push_back(report.final_grad_norm);
    }
    report.final_masses.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        report.final_masses[i] = cur.masses.masses[i] / cur.masses.total;

    auto [canonical, gauge] = canonicalize(potential_from(mu, v), cfg.r_policy, cfg.threads);
    report.gauge = gauge;
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(canonical), std::move(report)};
}

std::pair<PolyhedralPotential, GaugeTransform> canonicalize(
    const PolyhedralPotential& p, const RPolicy& policy, int threads) {
    const IntegrabilityWitness w = check_integrability(p);
    if (!w.integrable) throw std::domain_error("canonicalize: not integrable");

    double scale = 1.0;
    for (const auto& a : p.atoms)
        for (double c : a) scale = std::max(scale, std::abs(c));

    auto masses_of = [&](const PolyhedralPotential& q) {
        if (q.dim <= 2) return exact_masses(q, policy, threads);
        McOptions opt;
        opt.seed = 0xC0DEuLL;
        opt.threads = threads;
        return mc_masses(q, opt);
    };

    PolyhedralPotential cur = p;
    GaugeTransform total;
    total.translation.assign(p.dim, 0.0);
    MassResult mr = masses_of(cur);
    for (int it = 0; it < 100; ++it) {
        Vec b(p.dim);
        double mnorm = 0.0;
        for (int k = 0; k < p.dim; ++k) {
            b[k] = -mr.first_moment[k] / mr.total;
            mnorm = std::max(mnorm, std::abs(mr.first_moment[k]));
        }
        const double tol = (mr.exact ? 1e-12 : 4.0 * norm_inf(mr.first_moment_error)) *
                               std::max(1.0, scale) * mr.total +
                           1e-300;
        if (mnorm <= tol) break;
        cur = apply_gauge(cur, {b, 0.0});
        for (int k = 0; k < p.dim; ++k) total.translation[k] += b[k];
        mr = masses_of(cur);
    }
    total.constant = -std::log(mr.total);
    cur = apply_gauge(cur, {Vec(p.dim, 0.0), total.constant});
    return {std::move(cur), std::move(total)};
}

}  // namespace moments
