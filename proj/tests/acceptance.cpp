// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code = number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "moments/diagnostics.hpp"
#include "moments/forward.hpp"
#include "moments/io.hpp"
#include "moments/solver.hpp"

using namespace moments;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool pass,
            const std::string& detail) {
    std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), detail.c_str());
    if (!pass) ++failures;
}

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void criterion1() {
    const double t0 = now_s();
    DiscreteMeasure mu2;
    mu2.dim = 1;
    mu2.atoms = {{-1.0}, {1.0}};
    mu2.weights = {0.5, 0.5};
    auto [p2, r2] = solve(mu2);
    const double l2 = std::log(2.0);
    const double err_a = std::max(std::abs(p2.values[0] + l2),
                                  std::abs(p2.values[1] + l2));
    const double ta = now_s() - t0;

    const double t1 = now_s();
    DiscreteMeasure mu3;
    mu3.dim = 1;
    mu3.atoms = {{-1.0}, {0.0}, {1.0}};
    mu3.weights = {0.25, 0.5, 0.25};
    auto [p3, r3] = solve(mu3);
    const double l4 = std::log(4.0);
    const double err_b = std::max(
        {std::abs(p3.values[0] - (1.0 - l4)), std::abs(p3.values[1] + l4),
         std::abs(p3.values[2] - (1.0 - l4))});
    const double tb = now_s() - t1;

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "err_a=%.2e (%.2fs), err_b=%.2e (%.2fs)", err_a, ta, err_b, tb);
    report(1, "closed-form 1D solves at 1e-8",
           r2.converged && r3.converged && err_a <= 1e-8 && err_b <= 1e-8 &&
               ta < 1.0 && tb < 1.0,
           buf);
}

void criterion2() {
    const double t0 = now_s();
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const int n_atoms = 6 + static_cast<int>(s % 15);  // up to 20
        const DiscreteMeasure mu = random_measure_2d(100 + s, n_atoms);
        Rng rng(200 + s);
        Vec v(static_cast<std::size_t>(n_atoms));
        for (double& x : v) x = 0.3 * (2.0 * rng.uniform() - 1.0);
        const Vec g = gradient(mu, v);
        const double h = 1e-5;
        double scale = std::max(1e-8, norm_inf(g));
        for (std::size_t i = 0; i < v.size(); ++i) {
            Vec vp = v, vm = v;
            vp[i] += h;
            vm[i] -= h;
            const double fd = (objective(mu, vp) - objective(mu, vm)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - g[i]) / scale);
        }
    }
    const double dt = now_s() - t0;
    char buf[120];
    std::snprintf(buf, sizeof buf, "max rel err=%.2e, %.1fs", worst, dt);
    report(2, "gradient vs central differences on 50 instances",
           worst <= 1e-6 && dt < 30.0, buf);
}

// Shared by criteria 3 and 9.
struct MassScan {
    double worst_gradient_identity = 0.0;  // |sum m_i y_i| / Z
    double worst_ibp_violation = -1e300;   // sum y.M - n Z (should be <= 0-ish)
    double worst_ibp_residual = 0.0;       // |sum y.M - n Z| / Z
};

MassScan scan_random_masses() {
    MassScan scan;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const PolyhedralPotential p = random_potential_2d(300 + s, 6 + (s % 7));
        const MassResult mr = exact_masses(p);
        double gx = 0.0, gy = 0.0, ibp = 0.0;
        for (int i = 0; i < p.size(); ++i) {
            gx += mr.masses[i] * p.atoms[i][0];
            gy += mr.masses[i] * p.atoms[i][1];
            ibp += p.atoms[i][0] * mr.cell_moments[i][0] +
                   p.atoms[i][1] * mr.cell_moments[i][1];
        }
        scan.worst_gradient_identity = std::max(
            scan.worst_gradient_identity, std::hypot(gx, gy) / mr.total);
        const double viol = (ibp - 2.0 * mr.total) / mr.total;
        scan.worst_ibp_violation = std::max(scan.worst_ibp_violation, viol);
        scan.worst_ibp_residual = std::max(scan.worst_ibp_residual, std::abs(viol));
    }
    return scan;
}

void criterion3(const MassScan& scan) {
    char buf[120];
    std::snprintf(buf, sizeof buf, "max |sum m_i y_i|/Z = %.2e over 100 potentials",
                  scan.worst_gradient_identity);
    report(3, "zero gradient integral at 1e-10 Z",
           scan.worst_gradient_identity <= 1e-10, buf);
}

void criterion4() {
    const double t0 = now_s();
    bool all = true;
    std::string detail;
    const std::size_t n_samples = 1000000;
    const struct {
        const char* name;
        int dim;
    } cases[] = {{"cube", 2}, {"gaussian", 3}, {"sphere", 2}, {"simplex", 2}};
    for (const auto& c : cases) {
        for (const auto& r : gallery_run(c.name, c.dim, n_samples, 12345)) {
            if (!r.pass) {
                all = false;
                detail += std::string(r.name) + " ";
            }
        }
    }
    const double dt = now_s() - t0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%.1fs",
                  detail.empty() ? "all statistics within 4 se, " : detail.c_str(),
                  dt);
    report(4, "forward gallery at N=1e6", all && dt < 60.0, buf);
}

void criterion5() {
    SolverConfig cfg;
    cfg.gradient_tol = 1e-6;
    cfg.max_iters = 500;

    const double t0 = now_s();
    const Polygon2 square = {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
    const DiscreteMeasure sq = sample_uniform_polygon(square, 100, 2024);
    auto [ps, rs] = solve(sq, cfg);
    const double t_sq = now_s() - t0;

    const double t1 = now_s();
    const DiscreteMeasure hex = sample_uniform_polygon(regular_polygon(6), 200, 777);
    auto [ph, rh] = solve(hex, cfg);
    const double t_hex = now_s() - t1;

    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "square: %d iters g=%.1e %.1fs; hexagon: %d iters g=%.1e %.1fs",
                  rs.iterations, rs.final_grad_norm, t_sq, rh.iterations,
                  rh.final_grad_norm, t_hex);
    report(5, "empirical square (N=100) and hexagon (N=200) solves",
           rs.converged && rh.converged && rs.iterations <= 500 &&
               rh.iterations <= 500 && t_sq < 60.0 && t_hex < 60.0,
           buf);
}

void criterion6() {
    double worst = 0.0;
    bool all_converged = true;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const DiscreteMeasure mu = random_measure_2d(400 + s, 6 + (s % 5));
        SolverConfig cfg;
        cfg.gradient_tol = 1e-9;
        auto [p0, r0] = solve(mu, cfg);
        SolverConfig cfg1 = cfg;
        Rng rng(500 + s);
        cfg1.initial_values.resize(mu.atoms.size());
        for (double& x : cfg1.initial_values) x = 0.5 * (2.0 * rng.uniform() - 1.0);
        auto [p1, r1] = solve(mu, cfg1);
        all_converged = all_converged && r0.converged && r1.converged;
        for (std::size_t i = 0; i < mu.atoms.size(); ++i)
            worst = std::max(worst, std::abs(p0.values[i] - p1.values[i]));
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "max canonical value gap = %.2e over 20 instances",
                  worst);
    report(6, "uniqueness up to translation at 1e-6",
           all_converged && worst <= 1e-6, buf);
}

void criterion7() {
    struct Named {
        const char* name;
        SweepResult sw;
    };
    Named sweeps[] = {{"prekopa", sweep_prekopa_midpoint(100)},
                      {"subgradient", sweep_subgradient_prekopa(100)},
                      {"santalo", sweep_santalo(100)},
                      {"fradelizi", sweep_fradelizi(100)},
                      {"lower-bound", sweep_lower_bound(100)}};
    bool all = true;
    double worst_margin = 1e300;
    std::string failing;
    for (const auto& n : sweeps) {
        for (const auto& r : n.sw.results) {
            worst_margin = std::min(worst_margin, r.margin);
            if (r.margin < -1e-9) {
                all = false;
                failing += std::string(n.name) + " ";
            }
        }
    }
    const SweepResult controls = negative_controls();
    char buf[160];
    std::snprintf(buf, sizeof buf, "min margin=%.2e; controls %s%s", worst_margin,
                  controls.all_pass ? "all caught" : "MISSED", failing.c_str());
    report(7, "inequality sweeps (100 seeds each) and negative controls",
           all && controls.all_pass, buf);
}

void criterion8() {
    AnalyticPotential gauss;
    gauss.dim = 1;
    const double log_c = 0.5 * std::log(2.0 * 3.14159265358979323846);
    gauss.psi = [log_c](const Vec& x) { return 0.5 * x[0] * x[0] + log_c; };
    gauss.grad = [](const Vec& x) { return Vec{x[0]}; };
    std::vector<double> grid_g;
    for (double y = 0.2; y <= 2.0 + 1e-12; y += 0.05) grid_g.push_back(y);
    const double res_g = one_dim_identity_residual(
        gauss, [log_c](double y) { return std::exp(-0.5 * y * y - log_c); }, grid_g);

    AnalyticPotential cube1;
    cube1.dim = 1;
    cube1.psi = [](const Vec& x) {
        return 2.0 * std::log(std::cosh(0.5 * x[0])) + std::log(4.0);
    };
    cube1.grad = [](const Vec& x) { return Vec{std::tanh(0.5 * x[0])}; };
    std::vector<double> grid_c;
    for (double y = 0.1; y <= 0.9 + 1e-12; y += 0.02) grid_c.push_back(y);
    const double res_c = one_dim_identity_residual(
        cube1, [](double y) { return (1.0 - y * y) / 4.0; }, grid_c);

    char buf[120];
    std::snprintf(buf, sizeof buf, "gaussian residual=%.2e, cube residual=%.2e",
                  res_g, res_c);
    report(8, "1D inversion identity at 1e-6", res_g <= 1e-6 && res_c <= 1e-6, buf);
}

void criterion9(const MassScan& scan) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "max violation=%.2e, |residual|=%.2e (equality expected)",
                  scan.worst_ibp_violation, scan.worst_ibp_residual);
    report(9, "integration-by-parts bound on all exact instances",
           scan.worst_ibp_violation <= 1e-9, buf);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    const MassScan scan = scan_random_masses();
    criterion3(scan);
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9(scan);
    std::printf("%s (%d failure%s)\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
                failures, failures == 1 ? "" : "s");
    return failures;
}
