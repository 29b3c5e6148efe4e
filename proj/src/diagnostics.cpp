#include "moments/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "moments/cells.hpp"
#include "moments/quadrature.hpp"

namespace moments {

CheckResult make_check(const std::string& name, double lhs, double rhs, double tolerance,
                       const std::string& metadata) {
    CheckResult r;
    r.name = name;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tolerance = tolerance;
    r.pass = r.margin >= -tolerance;
    r.metadata = metadata;
    return r;
}

namespace {

double potential_scale(const PolyhedralPotential& p) {
    double s = 1.0;
    for (const auto& a : p.atoms)
        for (double c : a) s = std::max(s, std::abs(c));
    for (double v : p.values) s = std::max(s, std::abs(v));
    return s;
}

double conjugate_integral_1d(const PolyhedralPotential& p) {
    const std::vector<int> hull = lower_hull_1d(p);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        const double ya = p.atoms[hull[k]][0], yb = p.atoms[hull[k + 1]][0];
        const double len = yb - ya;
        if (len <= 0.0) continue;
        const std::array<double, 2> nodes{-p.values[hull[k]], -p.values[hull[k + 1]]};
        total += len * exp_divided_difference(nodes);
    }
    return total;
}

// The regions of linearity of the envelope are dual to the vertices of the
// cell complex: at a complex vertex q with active atoms A, the envelope equals
// q.y - psi(q) on conv(A).
double conjugate_integral_2d(const PolyhedralPotential& p, int threads,
                             double* coverage_defect) {
    const CellDecomposition decomp = build_cells(p, threads);
    const double scale = potential_scale(p);

    std::vector<Pt2> verts;
    for (const auto& cell : decomp.cells)
        for (const Pt2& v : cell.vertices) verts.push_back(v);
    std::sort(verts.begin(), verts.end(), [](Pt2 a, Pt2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    const double merge_tol = 1e-9 * scale;
    std::vector<Pt2> unique;
    for (const Pt2& v : verts) {
        bool dup = false;
        for (auto it = unique.rbegin(); it != unique.rend(); ++it) {
            if (v.x - it->x > merge_tol) break;
            if (std::abs(v.y - it->y) <= merge_tol && std::abs(v.x - it->x) <= merge_tol) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(v);
    }

    double total = 0.0;
    double covered = 0.0;
    for (const Pt2& q : unique) {
        const Vec x{q.x, q.y};
        const EvalResult e = eval(p, x);
        const double atol = 1e-9 * (1.0 + std::abs(e.value));
        std::vector<Pt2> act;
        for (int i = 0; i < p.size(); ++i) {
            const double s = dot(p.atoms[i], x) - p.values[i];
            if (s >= e.value - atol) act.push_back({p.atoms[i][0], p.atoms[i][1]});
        }
        if (act.size() < 3) continue;
        const Polygon2 face = convex_hull(act);
        if (face.size() < 3) continue;
        total += exp_affine_polygon(face, q, e.value);
        covered += polygon_area(face);
    }

    if (coverage_defect != nullptr) {
        std::vector<Pt2> atom_pts;
        for (const auto& a : p.atoms) atom_pts.push_back({a[0], a[1]});
        const double hull_area = polygon_area(convex_hull(atom_pts));
        *coverage_defect = std::abs(covered - hull_area) / std::max(hull_area, 1e-300);
    }
    return total;
}

void require_centered(const PolyhedralPotential& p, const MassResult& mr,
                      const char* who) {
    const double scale = potential_scale(p);
    if (norm_inf(mr.first_moment) > 1e-7 * scale * mr.total)
        throw std::domain_error(std::string(who) +
                                ": potential is not centered; canonicalize it first");
}

}  // namespace

double conjugate_integral(const PolyhedralPotential& p, int threads) {
    if (p.dim == 1) return conjugate_integral_1d(p);
    if (p.dim == 2) return conjugate_integral_2d(p, threads, nullptr);
    throw std::invalid_argument("conjugate_integral: dimensions 1-2 only");
}

CheckResult check_prekopa_midpoint(const std::vector<Vec>& atoms, int dim,
                                   const std::vector<double>& u0,
                                   const std::vector<double>& u1, double lambda) {
    PolyhedralPotential p;
    p.dim = dim;
    p.atoms = atoms;
    p.values = u0;
    const double z0 = exact_masses(p).total;
    p.values = u1;
    const double z1 = exact_masses(p).total;
    p.values.resize(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i)
        p.values[i] = (1.0 - lambda) * u0[i] + lambda * u1[i];
    const double zmid = exact_masses(p).total;

    std::ostringstream meta;
    meta << "lambda=" << lambda;
    return make_check("prekopa-midpoint",
                      (1.0 - lambda) * std::log(z0) + lambda * std::log(z1),
                      std::log(zmid), 1e-9, meta.str());
}

CheckResult check_subgradient_prekopa(const PolyhedralPotential& p0,
                                      const std::vector<double>& v1) {
    const MassResult m0 = exact_masses(p0);
    PolyhedralPotential p1 = p0;
    p1.values = v1;
    const MassResult m1 = exact_masses(p1);

    double rhs_paper = 0.0;
    bool vacuous = false;
    for (int i = 0; i < p0.size(); ++i) {
        const double w = m0.masses[i] / m0.total;
        if (w == 0.0) continue;
        const double phi0 = conjugate_at(p0, p0.atoms[i]);
        const double phi1 = conjugate_at(p1, p1.atoms[i]);
        if (!std::isfinite(phi0) || !std::isfinite(phi1)) {
            vacuous = true;
            break;
        }
        rhs_paper += w * (phi0 - phi1);
    }
    if (vacuous)
        return make_check("subgradient-prekopa", -kInfinity,
                          std::log(m0.total) - std::log(m1.total), 1e-9, "vacuous");
    return make_check("subgradient-prekopa", rhs_paper,
                      std::log(m0.total) - std::log(m1.total), 1e-9, "");
}

CheckResult check_santalo(const PolyhedralPotential& p, bool enforce_centering,
                          int threads) {
    const MassResult mr = exact_masses(p, {}, threads);
    if (enforce_centering) require_centered(p, mr, "check_santalo");
    double defect = 0.0;
    const double conj = p.dim == 1 ? conjugate_integral_1d(p)
                                   : conjugate_integral_2d(p, threads, &defect);
    const double product = mr.total * conj;
    const double bound = std::pow(2.0 * std::numbers::pi, p.dim);
    std::ostringstream meta;
    meta << "Z=" << mr.total << " conj=" << conj << " coverage_defect=" << defect;
    return make_check("santalo", product, bound, 1e-9, meta.str());
}

CheckResult check_fradelizi(const PolyhedralPotential& p, bool enforce_centering) {
    if (enforce_centering) {
        const MassResult mr = exact_masses(p);
        require_centered(p, mr, "check_fradelizi");
    }
    const Vec origin(p.dim, 0.0);
    const double psi0 = eval(p, origin).value;
    const double inf_psi = -conjugate_at(p, origin);
    return make_check("fradelizi", psi0, inf_psi + p.dim, 1e-9, "");
}

double min_directional_abs_moment(const DiscreteMeasure& mu) {
    const double w = mu.total_mass();
    if (mu.dim == 1) {
        double s = 0.0;
        for (int i = 0; i < mu.size(); ++i) s += mu.weights[i] * std::abs(mu.atoms[i][0]);
        return s / w;
    }
    if (mu.dim == 2) {
        double best = kInfinity;
        const int grid = 4096;
        for (int k = 0; k < grid; ++k) {
            const double th = std::numbers::pi * k / grid;
            const double c = std::cos(th), s = std::sin(th);
            double acc = 0.0;
            for (int i = 0; i < mu.size(); ++i)
                acc += mu.weights[i] * std::abs(c * mu.atoms[i][0] + s * mu.atoms[i][1]);
            best = std::min(best, acc / w);
        }
        return best;
    }
    Rng rng(0x1234u);
    double best = kInfinity;
    for (int k = 0; k < 8192; ++k) {
        Vec theta(mu.dim);
        double nrm = 0.0;
        for (int d = 0; d < mu.dim; ++d) {
            theta[d] = rng.normal();
            nrm += theta[d] * theta[d];
        }
        nrm = std::sqrt(nrm);
        double acc = 0.0;
        for (int i = 0; i < mu.size(); ++i)
            acc += mu.weights[i] * std::abs(dot(theta, mu.atoms[i])) / nrm;
        best = std::min(best, acc / w);
    }
    return best;
}

std::array<CheckResult, 2> check_lower_bound_lemma(const DiscreteMeasure& mu,
                                                   const PolyhedralPotential& p_test,
                                                   double cmu_inflation) {
    const int n = mu.dim;
    DiscreteMeasure prob = mu;
    const double w = mu.total_mass();
    for (double& x : prob.weights) x /= w;

    // Shift the data so the envelope vanishes at the origin.
    PolyhedralPotential p = p_test;
    const double phi_at_0 = conjugate_at(p, Vec(n, 0.0));
    if (!std::isfinite(phi_at_0))
        throw std::domain_error("check_lower_bound_lemma: origin outside conv(atoms)");
    for (double& v : p.values) v -= phi_at_0;

    const double m_mu = min_directional_abs_moment(prob);
    const double kappa = std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
    const double c_mu = cmu_inflation * std::pow(kappa, 1.0 / n) * m_mu /
                        (4.0 * std::exp(1.0 / n));

    // Envelope values at the measure atoms; +inf makes the bound vacuous.
    double int_phi = 0.0;
    bool vacuous = false;
    for (int i = 0; i < prob.size(); ++i) {
        const double phi = conjugate_at(p, prob.atoms[i]);
        if (!std::isfinite(phi)) {
            vacuous = true;
            break;
        }
        int_phi += prob.weights[i] * phi;
    }
    const double inf_phi = *std::min_element(p.values.begin(), p.values.end());
    const double int_exp_phi = conjugate_integral(p);
    const double z_psi = exact_masses(p).total;

    std::ostringstream meta;
    meta << "m_mu=" << m_mu << " c_mu=" << c_mu;
    if (vacuous) {
        return {make_check("lower-bound-volume", c_mu, kInfinity, 1e-9, "vacuous"),
                make_check("lower-bound-conjugate", -kInfinity, kInfinity, 1e-9,
                           "vacuous")};
    }
    const CheckResult l44 =
        make_check("lower-bound-volume", c_mu,
                   std::pow(int_exp_phi, 1.0 / n) * (int_phi - inf_phi + 1.0), 1e-9,
                   meta.str());
    const CheckResult l45 = make_check(
        "lower-bound-conjugate",
        c_mu / (2.0 * std::numbers::pi) * std::pow(z_psi, 1.0 / n) - (n + 1.0), int_phi,
        1e-9, meta.str());
    return {l44, l45};
}

namespace {

void add_stat_check(std::vector<CheckResult>& out, const std::string& name, double value,
                    double target, double se, const std::string& meta) {
    out.push_back(
        make_check(name, std::abs(value - target), 4.0 * se + 1e-12, 0.0, meta));
}

}  // namespace

std::vector<CheckResult> gallery_run(const std::string& case_name, int dim,
                                     std::size_t samples, std::uint64_t seed,
                                     int threads) {
    std::vector<CheckResult> out;
    std::ostringstream meta;
    meta << "case=" << case_name << " n=" << dim << " N=" << samples << " seed=" << seed;

    auto coord_stat = [](const MomentMeasureEstimate& m, int k) {
        return weighted_stat(m, [k](const double* pt) { return pt[k]; });
    };

    if (case_name == "cube") {
        const MomentMeasureEstimate m =
            moment_measure_sampled(cube_potential(dim), samples, seed, threads);
        for (int k = 0; k < dim; ++k) {
            const Statistic s = coord_stat(m, k);
            add_stat_check(out, "cube-mean", s.value, 0.0, s.se, meta.str());
            const Statistic a =
                weighted_stat(m, [k](const double* pt) { return std::abs(pt[k]); });
            add_stat_check(out, "cube-abs-moment", a.value, 0.5, a.se, meta.str());
        }
        std::size_t violations = 0;
        for (std::size_t i = 0; i < m.size(); ++i)
            for (int k = 0; k < dim; ++k)
                if (std::abs(m.coords[i * dim + k]) > 1.0 + 1e-9) ++violations;
        out.push_back(make_check("cube-support", static_cast<double>(violations), 0.0,
                                 0.0, meta.str()));
    } else if (case_name == "gaussian") {
        const MomentMeasureEstimate m =
            moment_measure_sampled(gaussian_potential(dim), samples, seed, threads);
        for (int k = 0; k < dim; ++k) {
            const Statistic s = coord_stat(m, k);
            add_stat_check(out, "gaussian-mean", s.value, 0.0, s.se, meta.str());
            const double mean = s.value;
            const Statistic v = weighted_stat(m, [k, mean](const double* pt) {
                return (pt[k] - mean) * (pt[k] - mean);
            });
            add_stat_check(out, "gaussian-variance", v.value, 1.0, v.se, meta.str());
        }
    } else if (case_name == "sphere") {
        const MomentMeasureEstimate m =
            moment_measure_sampled(norm_potential(dim), samples, seed, threads);
        double worst = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            double r = 0.0;
            for (int k = 0; k < dim; ++k)
                r += m.coords[i * dim + k] * m.coords[i * dim + k];
            worst = std::max(worst, std::abs(std::sqrt(r) - 1.0));
        }
        out.push_back(make_check("sphere-radius", worst, 1e-9, 0.0, meta.str()));
        for (int k = 0; k < dim; ++k) {
            const Statistic s = coord_stat(m, k);
            add_stat_check(out, "sphere-mean", s.value, 0.0, s.se, meta.str());
        }
    } else if (case_name == "simplex") {
        const MomentMeasureEstimate m =
            moment_measure_sampled(simplex_potential(dim), samples, seed, threads);
        for (int k = 0; k < dim; ++k) {
            const Statistic s = coord_stat(m, k);
            add_stat_check(out, "simplex-mean", s.value, 0.0, s.se, meta.str());
        }
        const Statistic r2 = weighted_stat(m, [dim](const double* pt) {
            double r = 0.0;
            for (int k = 0; k < dim; ++k) r += pt[k] * pt[k];
            return r;
        });
        add_stat_check(out, "simplex-second-moment", r2.value, 1.0 / (dim + 2.0), r2.se,
                       meta.str());
        // Membership: barycentric coordinates with respect to the vertices.
        const DiscreteMeasure verts = simplex_vertices(dim);
        std::size_t violations = 0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            // lambda_j = (1 + n y . u_j) / (n+1) for the regular simplex.
            for (int j = 0; j < verts.size(); ++j) {
                double d = 0.0;
                for (int k = 0; k < dim; ++k) d += m.coords[i * dim + k] * verts.atoms[j][k];
                if ((1.0 + dim * d) / (dim + 1.0) < -1e-9) ++violations;
            }
        }
        out.push_back(make_check("simplex-support", static_cast<double>(violations), 0.0,
                                 0.0, meta.str()));
    } else if (case_name == "parallelepiped") {
        if (dim != 2)
            throw std::invalid_argument("gallery_run: parallelepiped case is 2D");
        Rng rng(seed ^ 0xABCDuLL);
        std::vector<Vec> t(2, Vec(2, 0.0));
        double det = 0.0;
        do {
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    t[r][c] = (r == c ? 1.0 : 0.0) + 0.5 * (2.0 * rng.uniform() - 1.0);
            det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
        } while (std::abs(det) < 0.3);
        const AnalyticPotential base = cube_potential(2);
        const AnalyticPotential a = linear_image_potential(base, t);
        const MomentMeasureEstimate m = moment_measure_sampled(a, samples, seed, threads);
        for (int k = 0; k < 2; ++k) {
            const Statistic s = coord_stat(m, k);
            add_stat_check(out, "parallelepiped-mean", s.value, 0.0, s.se, meta.str());
        }
        // Covariance target: T^T (I/3) T.
        for (int r = 0; r < 2; ++r)
            for (int c = r; c < 2; ++c) {
                double target = 0.0;
                for (int k = 0; k < 2; ++k) target += t[k][r] * t[k][c] / 3.0;
                const Statistic s = weighted_stat(m, [r, c](const double* pt) {
                    return pt[r] * pt[c];
                });
                add_stat_check(out, "parallelepiped-cov", s.value, target, s.se,
                               meta.str());
            }
        // Membership: T^{-T} y must land in the cube.
        std::size_t violations = 0;
        const double inv_det = 1.0 / det;
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double y0 = m.coords[2 * i], y1 = m.coords[2 * i + 1];
            // rows of T^{-T} = (T^{-1})^T; T^{-1} = adj(T)/det.
            const double u0 = inv_det * (t[1][1] * y0 - t[1][0] * y1);
            const double u1 = inv_det * (-t[0][1] * y0 + t[0][0] * y1);
            if (std::abs(u0) > 1.0 + 1e-9 || std::abs(u1) > 1.0 + 1e-9) ++violations;
        }
        out.push_back(make_check("parallelepiped-support",
                                 static_cast<double>(violations), 0.0, 0.0, meta.str()));
    } else {
        throw std::invalid_argument("gallery_run: unknown case '" + case_name + "'");
    }
    return out;
}

PolyhedralPotential random_potential_2d(std::uint64_t seed, int n_atoms,
                                        double value_spread) {
    Rng rng(seed);
    for (int attempt = 0; attempt < 200; ++attempt) {
        PolyhedralPotential p;
        p.dim = 2;
        for (int i = 0; i < n_atoms; ++i) p.atoms.push_back({rng.normal(), rng.normal()});
        Vec mean(2, 0.0);
        for (const auto& a : p.atoms) {
            mean[0] += a[0];
            mean[1] += a[1];
        }
        for (auto& a : p.atoms) {
            a[0] -= mean[0] / n_atoms;
            a[1] -= mean[1] / n_atoms;
        }
        for (int i = 0; i < n_atoms; ++i)
            p.values.push_back(value_spread * (2.0 * rng.uniform() - 1.0));
        if (check_integrability(p).alpha > 0.05) return p;
    }
    throw std::runtime_error("random_potential_2d: failed to build an integrable instance");
}

DiscreteMeasure random_measure_2d(std::uint64_t seed, int n_atoms) {
    Rng rng(seed);
    for (int attempt = 0; attempt < 200; ++attempt) {
        DiscreteMeasure mu;
        mu.dim = 2;
        for (int i = 0; i < n_atoms; ++i) {
            mu.atoms.push_back({rng.normal(), rng.normal()});
            mu.weights.push_back(0.5 + rng.uniform());
        }
        mu = center(mu);
        const ValidationReport rep = validate(mu);
        PolyhedralPotential p;
        p.dim = 2;
        p.atoms = mu.atoms;
        p.values.assign(n_atoms, 0.0);
        if (rep.all_ok() && rep.smallest_singular_value > 0.2 &&
            check_integrability(p).alpha > 0.05)
            return mu;
    }
    throw std::runtime_error("random_measure_2d: failed to build a valid instance");
}

SweepResult sweep_prekopa_midpoint(int n_seeds, int threads) {
    SweepResult sw;
    sw.results.resize(n_seeds * 2);
    parallel_for(static_cast<std::size_t>(n_seeds), threads, [&](std::size_t s) {
        const PolyhedralPotential p = random_potential_2d(1000 + s, 8);
        Rng rng(2000 + s);
        std::vector<double> u0(p.values), u1(p.values.size());
        for (auto& v : u1) v = 0.5 * (2.0 * rng.uniform() - 1.0);
        CheckResult r = check_prekopa_midpoint(p.atoms, 2, u0, u1, 0.5);
        r.metadata += " seed=" + std::to_string(s);
        sw.results[2 * s] = r;
        // Gauge-translate equality case.
        const Vec b{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        std::vector<double> u_gauge(u0);
        for (std::size_t i = 0; i < u0.size(); ++i)
            u_gauge[i] += dot(p.atoms[i], b) + 0.3;
        CheckResult g = check_prekopa_midpoint(p.atoms, 2, u0, u_gauge, 0.5);
        g.name = "prekopa-midpoint-gauge-equality";
        g.pass = g.pass && std::abs(g.margin) <= 1e-9;
        g.metadata += " seed=" + std::to_string(s);
        sw.results[2 * s + 1] = g;
    });
    for (const auto& r : sw.results) sw.all_pass = sw.all_pass && r.pass;
    return sw;
}

SweepResult sweep_subgradient_prekopa(int n_seeds, int threads) {
    SweepResult sw;
    sw.results.resize(n_seeds);
    parallel_for(static_cast<std::size_t>(n_seeds), threads, [&](std::size_t s) {
        const DiscreteMeasure mu = random_measure_2d(3000 + s, 6);
        SolverConfig cfg;
        cfg.gradient_tol = 1e-9;
        cfg.max_iters = 400;
        cfg.threads = 1;
        auto [p0, rep] = solve(mu, cfg);
        Rng rng(4000 + s);
        std::vector<double> v1 = p0.values;
        for (auto& v : v1) v += 0.1 * (2.0 * rng.uniform() - 1.0);
        CheckResult r = check_subgradient_prekopa(p0, v1);
        r.metadata += " seed=" + std::to_string(s) +
                      " solver_converged=" + (rep.converged ? "1" : "0");
        sw.results[s] = r;
    });
    for (const auto& r : sw.results) sw.all_pass = sw.all_pass && r.pass;
    return sw;
}

SweepResult sweep_santalo(int n_seeds, int threads) {
    SweepResult sw;
    sw.results.resize(n_seeds);
    parallel_for(static_cast<std::size_t>(n_seeds), threads, [&](std::size_t s) {
        const PolyhedralPotential p = random_potential_2d(5000 + s, 10);
        auto [canon, gauge] = canonicalize(p);
        CheckResult r = check_santalo(canon, true, 1);
        r.metadata += " seed=" + std::to_string(s);
        sw.results[s] = r;
    });
    for (const auto& r : sw.results) sw.all_pass = sw.all_pass && r.pass;
    return sw;
}

SweepResult sweep_fradelizi(int n_seeds, int threads) {
    SweepResult sw;
    sw.results.resize(n_seeds);
    parallel_for(static_cast<std::size_t>(n_seeds), threads, [&](std::size_t s) {
        const PolyhedralPotential p = random_potential_2d(6000 + s, 9);
        auto [canon, gauge] = canonicalize(p);
        CheckResult r = check_fradelizi(canon);
        r.metadata += " seed=" + std::to_string(s);
        sw.results[s] = r;
    });
    for (const auto& r : sw.results) sw.all_pass = sw.all_pass && r.pass;
    return sw;
}

SweepResult sweep_lower_bound(int n_seeds, int threads) {
    SweepResult sw;
    sw.results.resize(n_seeds * 2);
    parallel_for(static_cast<std::size_t>(n_seeds), threads, [&](std::size_t s) {
        const DiscreteMeasure mu = random_measure_2d(7000 + s, 8);
        PolyhedralPotential p;
        p.dim = 2;
        p.atoms = mu.atoms;
        Rng rng(8000 + s);
        for (int i = 0; i < mu.size(); ++i)
            p.values.push_back(0.5 * (2.0 * rng.uniform() - 1.0));
        const auto pair = check_lower_bound_lemma(mu, p);
        sw.results[2 * s] = pair[0];
        sw.results[2 * s + 1] = pair[1];
        sw.results[2 * s].metadata += " seed=" + std::to_string(s);
        sw.results[2 * s + 1].metadata += " seed=" + std::to_string(s);
    });
    for (const auto& r : sw.results) sw.all_pass = sw.all_pass && r.pass;
    return sw;
}

SweepResult negative_controls() {
    SweepResult sw;
    auto record = [&](const std::string& name, bool caught, const std::string& meta) {
        CheckResult r;
        r.name = name;
        r.pass = caught;
        r.margin = caught ? 0.0 : -1.0;
        r.tolerance = 0.0;
        r.metadata = meta;
        sw.results.push_back(r);
    };

    // Santalo on a far-translated (uncentered) potential: the raw product must
    // violate the bound, and the guarded checker must refuse the input.
    {
        const PolyhedralPotential p = random_potential_2d(42, 8);
        auto [canon, g] = canonicalize(p);
        bool raw_violation = false;
        double shift = 2.0;
        for (int k = 0; k < 6 && !raw_violation; ++k, shift *= 2.0) {
            const PolyhedralPotential bad =
                apply_gauge(canon, {{shift, shift}, 0.0});
            const CheckResult raw = check_santalo(bad, false);
            raw_violation = !raw.pass;
        }
        record("control-santalo-raw-violation", raw_violation, "");
        bool refused = false;
        try {
            check_santalo(apply_gauge(canon, {{4.0, 4.0}, 0.0}), true);
        } catch (const std::domain_error&) {
            refused = true;
        }
        record("control-santalo-guard-refusal", refused, "");
    }

    // Fradelizi guard must refuse an uncentered potential.
    {
        const PolyhedralPotential p = random_potential_2d(43, 8);
        auto [canon, g] = canonicalize(p);
        bool refused = false;
        try {
            check_fradelizi(apply_gauge(canon, {{3.0, -2.0}, 0.0}), true);
        } catch (const std::domain_error&) {
            refused = true;
        }
        record("control-fradelizi-guard-refusal", refused, "");
    }

    // Midpoint values corrupted by a uniform (non-matching) offset: the margin
    // must go negative.
    {
        const PolyhedralPotential p = random_potential_2d(44, 8);
        Rng rng(45);
        std::vector<double> u1(p.values.size());
        for (auto& v : u1) v = 0.5 * (2.0 * rng.uniform() - 1.0);
        CheckResult good = check_prekopa_midpoint(p.atoms, 2, p.values, u1, 0.5);
        // Corruption: evaluate the midpoint potential with all values lowered.
        PolyhedralPotential mid;
        mid.dim = 2;
        mid.atoms = p.atoms;
        mid.values.resize(u1.size());
        for (std::size_t i = 0; i < u1.size(); ++i)
            mid.values[i] = 0.5 * (p.values[i] + u1[i]) - 1.0;
        const double zmid = exact_masses(mid).total;
        const double corrupted_margin = std::log(zmid) - good.lhs;
        record("control-prekopa-midpoint-corrupted", corrupted_margin < -1e-6, "");
    }

    // Subgradient form with an inflated right-hand side.
    {
        const DiscreteMeasure mu = random_measure_2d(46, 6);
        SolverConfig cfg;
        cfg.gradient_tol = 1e-9;
        auto [p0, rep] = solve(mu, cfg);
        Rng rng(47);
        std::vector<double> v1 = p0.values;
        for (auto& v : v1) v += 0.1 * (2.0 * rng.uniform() - 1.0);
        CheckResult r = check_subgradient_prekopa(p0, v1);
        const double corrupted_margin = r.margin - 1.0;
        record("control-subgradient-rhs-corrupted", corrupted_margin < -1e-6, "");
    }

    // Lower-bound lemma with an inflated constant.
    {
        const DiscreteMeasure mu = random_measure_2d(48, 8);
        PolyhedralPotential p;
        p.dim = 2;
        p.atoms = mu.atoms;
        p.values.assign(mu.atoms.size(), 0.0);
        const auto pair = check_lower_bound_lemma(mu, p, 1e6);
        record("control-lower-bound-cmu-inflated", !pair[0].pass, "");
    }

    // Truncated push-forward cloud must fail the barycenter condition.
    {
        MomentMeasureEstimate m =
            moment_measure_sampled(gaussian_potential(2), 20000, 7);
        MomentMeasureEstimate cut;
        cut.dim = 2;
        cut.exact = false;
        double wsum = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m.coords[2 * i] > 0.0) continue;
            cut.coords.push_back(m.coords[2 * i]);
            cut.coords.push_back(m.coords[2 * i + 1]);
            cut.weights.push_back(m.weights[i]);
            wsum += m.weights[i];
        }
        for (double& w : cut.weights) w /= wsum;
        cut.barycenter.assign(2, 0.0);
        cut.barycenter_se.assign(2, 0.0);
        for (std::size_t i = 0; i < cut.size(); ++i) {
            cut.barycenter[0] += cut.weights[i] * cut.coords[2 * i];
            cut.barycenter[1] += cut.weights[i] * cut.coords[2 * i + 1];
        }
        for (std::size_t i = 0; i < cut.size(); ++i) {
            const double d0 = cut.coords[2 * i] - cut.barycenter[0];
            const double d1 = cut.coords[2 * i + 1] - cut.barycenter[1];
            cut.barycenter_se[0] += cut.weights[i] * cut.weights[i] * d0 * d0;
            cut.barycenter_se[1] += cut.weights[i] * cut.weights[i] * d1 * d1;
        }
        cut.barycenter_se[0] = std::sqrt(cut.barycenter_se[0]);
        cut.barycenter_se[1] = std::sqrt(cut.barycenter_se[1]);
        const ValidationReport rep = necessary_conditions_report(cut);
        record("control-truncated-cloud-barycenter", !rep.barycenter_ok, "");
    }

    for (const auto& r : sw.results) sw.all_pass = sw.all_pass && r.pass;
    return sw;
}

}  // namespace moments
