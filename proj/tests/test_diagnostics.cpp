#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "moments/diagnostics.hpp"
#include "moments/io.hpp"

using namespace moments;

namespace {

PolyhedralPotential canonical_abs_1d() {
    PolyhedralPotential p;
    p.dim = 1;
    p.atoms = {{-1.0}, {1.0}};
    p.values = {-std::log(2.0), -std::log(2.0)};
    return p;
}

PolyhedralPotential gaussian_grid_1d(int n_atoms, double span) {
    PolyhedralPotential p;
    p.dim = 1;
    for (int i = 0; i < n_atoms; ++i) {
        const double y = -span + 2.0 * span * i / (n_atoms - 1);
        p.atoms.push_back({y});
        p.values.push_back(0.5 * y * y);
    }
    return p;
}

}  // namespace

TEST_CASE("check sign convention") {
    const CheckResult ok = make_check("x", 1.0, 2.0, 1e-9);
    CHECK(ok.pass);
    CHECK(ok.margin == doctest::Approx(1.0));
    CHECK_FALSE(make_check("x", 2.0, 1.0, 1e-9).pass);
    CHECK(make_check("x", 1.0, 1.0 - 1e-10, 1e-9).pass);  // within tolerance
}

TEST_CASE("conjugate integral closed forms") {
    // Envelope of the canonical |x| data is constant -log 2 on [-1, 1].
    CHECK(conjugate_integral(canonical_abs_1d()) == doctest::Approx(4.0));

    PolyhedralPotential sup;
    sup.dim = 2;
    sup.atoms = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    sup.values = {0.0, 0.0, 0.0, 0.0};
    // Envelope 0 on the diamond of area 2.
    CHECK(conjugate_integral(sup) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("midpoint form: equality cases and random sweep") {
    const PolyhedralPotential p = random_potential_2d(301, 8);
    const CheckResult self = check_prekopa_midpoint(p.atoms, 2, p.values, p.values, 0.5);
    CHECK(self.pass);
    CHECK(std::abs(self.margin) <= 1e-11);

    // Gauge-translate of the same data: equality case.
    std::vector<double> shifted = p.values;
    for (std::size_t i = 0; i < shifted.size(); ++i)
        shifted[i] += dot(p.atoms[i], {0.4, -0.7}) + 0.9;
    const CheckResult gauge =
        check_prekopa_midpoint(p.atoms, 2, p.values, shifted, 0.5);
    CHECK(gauge.pass);
    CHECK(std::abs(gauge.margin) <= 1e-10);

    Rng rng(302);
    for (int trial = 0; trial < 15; ++trial) {
        std::vector<double> u1(p.values.size());
        for (auto& v : u1) v = 0.6 * (2.0 * rng.uniform() - 1.0);
        const double lambda = 0.25 + 0.5 * rng.uniform();
        CHECK(check_prekopa_midpoint(p.atoms, 2, p.values, u1, lambda).pass);
    }
}

TEST_CASE("subgradient form: equality at the optimum and under gauge moves") {
    const DiscreteMeasure mu = random_measure_2d(303, 6);
    SolverConfig cfg;
    cfg.gradient_tol = 1e-10;
    auto [p0, rep] = solve(mu, cfg);
    REQUIRE(rep.converged);

    const CheckResult self = check_subgradient_prekopa(p0, p0.values);
    CHECK(self.pass);
    CHECK(std::abs(self.margin) <= 1e-10);

    std::vector<double> gauge_dir = p0.values;
    for (std::size_t i = 0; i < gauge_dir.size(); ++i)
        gauge_dir[i] += dot(p0.atoms[i], {-0.3, 0.5}) + 0.2;
    const CheckResult g = check_subgradient_prekopa(p0, gauge_dir);
    CHECK(g.pass);
    CHECK(std::abs(g.margin) <= 1e-9);

    Rng rng(304);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v1 = p0.values;
        for (auto& v : v1) v += 0.1 * (2.0 * rng.uniform() - 1.0);
        CHECK(check_subgradient_prekopa(p0, v1).pass);
    }
}

TEST_CASE("santalo: hand case, gaussian refinement from below, guard") {
    // Z = 1, conjugate integral 4: product 4 <= 2 pi.
    const CheckResult abs_case = check_santalo(canonical_abs_1d());
    CHECK(abs_case.pass);
    CHECK(abs_case.lhs == doctest::Approx(4.0).epsilon(1e-10));

    auto product_of = [](int n_atoms) {
        auto [canon, g] = canonicalize(gaussian_grid_1d(n_atoms, 6.0));
        const CheckResult r = check_santalo(canon);
        REQUIRE(r.pass);
        return r.lhs;
    };
    const double p100 = product_of(100);
    const double p200 = product_of(200);
    const double two_pi = 2.0 * std::numbers::pi;
    CHECK(p100 <= two_pi + 1e-9);
    CHECK(p200 <= two_pi + 1e-9);
    CHECK(two_pi - p200 < two_pi - p100);  // refinement approaches the bound
    CHECK(two_pi - p200 <= 2e-3);

    const PolyhedralPotential q = random_potential_2d(306, 10);
    auto [canon, gq] = canonicalize(q);
    CHECK(check_santalo(canon).pass);
    CHECK_THROWS_AS(check_santalo(apply_gauge(canon, {{2.0, 2.0}, 0.0})),
                    std::domain_error);
}

TEST_CASE("fradelizi: symmetric margin 1, random canonical, guard") {
    const CheckResult r = check_fradelizi(canonical_abs_1d());
    CHECK(r.pass);
    CHECK(r.margin == doctest::Approx(1.0).epsilon(1e-12));

    const PolyhedralPotential q = random_potential_2d(307, 9);
    auto [canon, g] = canonicalize(q);
    CHECK(check_fradelizi(canon).pass);
    CHECK_THROWS_AS(check_fradelizi(apply_gauge(canon, {{1.5, -2.5}, 0.0})),
                    std::domain_error);
}

TEST_CASE("directional moment: sup-norm value and exact scaling") {
    DiscreteMeasure mu;
    mu.dim = 2;
    mu.atoms = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    mu.weights = {0.25, 0.25, 0.25, 0.25};
    // (|cos| + |sin|)/2 minimized at the axes: 1/2.
    CHECK(min_directional_abs_moment(mu) == doctest::Approx(0.5).epsilon(1e-6));

    DiscreteMeasure mu2 = mu;
    for (auto& a : mu2.atoms)
        for (double& c : a) c *= 2.0;
    CHECK(min_directional_abs_moment(mu2) ==
          doctest::Approx(2.0 * min_directional_abs_moment(mu)).epsilon(1e-12));
}

TEST_CASE("lower bound lemmas hold on the sup-norm instance and random pairs") {
    DiscreteMeasure mu;
    mu.dim = 2;
    mu.atoms = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    mu.weights = {0.25, 0.25, 0.25, 0.25};
    PolyhedralPotential p;
    p.dim = 2;
    p.atoms = mu.atoms;
    p.values.assign(4, 0.0);
    const auto pair = check_lower_bound_lemma(mu, p);
    CHECK(pair[0].pass);
    CHECK(pair[0].margin > 0.0);
    CHECK(pair[1].pass);
    CHECK(pair[1].margin > 0.0);

    for (std::uint64_t s = 0; s < 10; ++s) {
        const DiscreteMeasure m = random_measure_2d(9000 + s, 8);
        PolyhedralPotential q;
        q.dim = 2;
        q.atoms = m.atoms;
        Rng rng(9100 + s);
        for (int i = 0; i < m.size(); ++i)
            q.values.push_back(0.5 * (2.0 * rng.uniform() - 1.0));
        const auto res = check_lower_bound_lemma(m, q);
        CHECK(res[0].pass);
        CHECK(res[1].pass);
    }
}

TEST_CASE("gallery smoke runs pass their statistics") {
    for (const auto& r : gallery_run("cube", 2, 200000, 21)) CHECK(r.pass);
    for (const auto& r : gallery_run("sphere", 2, 100000, 22)) CHECK(r.pass);
    for (const auto& r : gallery_run("gaussian", 3, 200000, 23)) CHECK(r.pass);
    for (const auto& r : gallery_run("simplex", 2, 100000, 24)) CHECK(r.pass);
    for (const auto& r : gallery_run("parallelepiped", 2, 200000, 25)) CHECK(r.pass);
    CHECK_THROWS_AS(gallery_run("nope", 2, 10, 1), std::invalid_argument);
}

TEST_CASE("small sweeps pass and the ledger serializes") {
    CHECK(sweep_prekopa_midpoint(5).all_pass);
    CHECK(sweep_santalo(5).all_pass);
    CHECK(sweep_fradelizi(5).all_pass);
    CHECK(sweep_lower_bound(5).all_pass);
    const SweepResult sg = sweep_subgradient_prekopa(3);
    CHECK(sg.all_pass);
    const std::string csv = ledger_to_csv(sg.results);
    CHECK(csv.find("subgradient-prekopa") != std::string::npos);
}

TEST_CASE("negative controls are all caught") {
    const SweepResult sw = negative_controls();
    for (const auto& r : sw.results) {
        INFO(r.name);
        CHECK(r.pass);
    }
    CHECK(sw.all_pass);
}
