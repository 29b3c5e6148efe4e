#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "moments/forward.hpp"

using namespace moments;

namespace {

PolyhedralPotential make_1d(std::vector<Vec> atoms, std::vector<double> values) {
    PolyhedralPotential p;
    p.dim = 1;
    p.atoms = std::move(atoms);
    p.values = std::move(values);
    return p;
}

}  // namespace

TEST_CASE("polyhedral push-forward: closed-form weights") {
    const double l2 = std::log(2.0);
    const MomentMeasureEstimate half =
        moment_measure_polyhedral(make_1d({{-1.0}, {1.0}}, {-l2, -l2}));
    CHECK(half.exact);
    CHECK(half.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(half.weights[1] == doctest::Approx(0.5).epsilon(1e-12));

    PolyhedralPotential sup;
    sup.dim = 2;
    sup.atoms = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    sup.values = {0.0, 0.0, 0.0, 0.0};
    const MomentMeasureEstimate quarters = moment_measure_polyhedral(sup);
    for (int i = 0; i < 4; ++i)
        CHECK(quarters.weights[i] == doctest::Approx(0.25).epsilon(1e-12));

    // psi = max(-x, 2x): masses 1 and 1/2, Z = 3/2.
    const MomentMeasureEstimate skew =
        moment_measure_polyhedral(make_1d({{-1.0}, {2.0}}, {0.0, 0.0}));
    CHECK(skew.weights[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(skew.weights[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(skew.barycenter[0]) <= 1e-12);
}

TEST_CASE("push-forward weights are gauge invariant") {
    PolyhedralPotential p;
    p.dim = 2;
    p.atoms = {{1.0, 0.2}, {-1.0, 0.1}, {0.0, 1.0}, {0.0, -1.0}, {0.3, -0.2}};
    p.values = {0.1, -0.2, 0.0, 0.3, 0.0};
    const MomentMeasureEstimate base = moment_measure_polyhedral(p);
    const MomentMeasureEstimate moved =
        moment_measure_polyhedral(apply_gauge(p, {{0.8, -0.6}, 0.0}));
    const MomentMeasureEstimate scaled =
        moment_measure_polyhedral(apply_gauge(p, {{0.0, 0.0}, 1.3}));
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(moved.weights[i] == doctest::Approx(base.weights[i]).epsilon(1e-10));
        CHECK(scaled.weights[i] == doctest::Approx(base.weights[i]).epsilon(1e-12));
    }
}

TEST_CASE("sampled push-forward: gaussian moments") {
    const MomentMeasureEstimate m =
        moment_measure_sampled(gaussian_potential(1), 200000, 11);
    const Statistic mean = weighted_stat(m, [](const double* y) { return y[0]; });
    CHECK(std::abs(mean.value) <= 4.0 * mean.se);
    const double mu = mean.value;
    const Statistic var = weighted_stat(
        m, [mu](const double* y) { return (y[0] - mu) * (y[0] - mu); });
    CHECK(std::abs(var.value - 1.0) <= 4.0 * var.se);
}

TEST_CASE("sampled push-forward: cube and simplex support") {
    const MomentMeasureEstimate cube =
        moment_measure_sampled(cube_potential(2), 100000, 5);
    for (int k = 0; k < 2; ++k) {
        const int kk = k;
        const Statistic mean =
            weighted_stat(cube, [kk](const double* y) { return y[kk]; });
        CHECK(std::abs(mean.value) <= 4.0 * mean.se);
        const Statistic am =
            weighted_stat(cube, [kk](const double* y) { return std::abs(y[kk]); });
        CHECK(std::abs(am.value - 0.5) <= 4.0 * am.se);
    }
    for (std::size_t i = 0; i < cube.size(); ++i) {
        CHECK(std::abs(cube.coords[2 * i]) <= 1.0);
        CHECK(std::abs(cube.coords[2 * i + 1]) <= 1.0);
    }

    const MomentMeasureEstimate spx =
        moment_measure_sampled(simplex_potential(2), 100000, 6);
    const DiscreteMeasure verts = simplex_vertices(2);
    for (std::size_t i = 0; i < spx.size(); ++i)
        for (int j = 0; j < 3; ++j) {
            const double d = spx.coords[2 * i] * verts.atoms[j][0] +
                             spx.coords[2 * i + 1] * verts.atoms[j][1];
            CHECK((1.0 + 2.0 * d) / 3.0 >= -1e-9);
        }
    for (int k = 0; k < 2; ++k) {
        const int kk = k;
        const Statistic mean =
            weighted_stat(spx, [kk](const double* y) { return y[kk]; });
        CHECK(std::abs(mean.value) <= 4.0 * mean.se);
    }
}

TEST_CASE("necessary conditions hold on produced estimates and fail on truncation") {
    PolyhedralPotential p;
    p.dim = 2;
    p.atoms = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    p.values = {0.3, 0.0, -0.1, 0.0};
    CHECK(necessary_conditions_report(moment_measure_polyhedral(p)).barycenter_ok);

    const MomentMeasureEstimate g =
        moment_measure_sampled(gaussian_potential(2), 50000, 3);
    const ValidationReport rep = necessary_conditions_report(g);
    CHECK(rep.mass_ok);
    CHECK(rep.span_ok);
    CHECK(rep.barycenter_ok);

    // Negative control: drop everything with y_1 > 0.
    MomentMeasureEstimate cut;
    cut.dim = 2;
    cut.exact = false;
    double wsum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.coords[2 * i] > 0.0) continue;
        cut.coords.push_back(g.coords[2 * i]);
        cut.coords.push_back(g.coords[2 * i + 1]);
        cut.weights.push_back(g.weights[i]);
        wsum += g.weights[i];
    }
    for (double& w : cut.weights) w /= wsum;
    cut.barycenter_se.assign(2, 1e-2);
    cut.barycenter.assign(2, 0.0);
    for (std::size_t i = 0; i < cut.size(); ++i) {
        cut.barycenter[0] += cut.weights[i] * cut.coords[2 * i];
        cut.barycenter[1] += cut.weights[i] * cut.coords[2 * i + 1];
    }
    CHECK_FALSE(necessary_conditions_report(cut).barycenter_ok);
}

TEST_CASE("surface variant: unit radii, reweighting, half-normal mean") {
    // Sphere-supported estimate: weights unchanged.
    PolyhedralPotential sup;
    sup.dim = 2;
    sup.atoms = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    sup.values = {0.0, 0.0, 0.0, 0.0};
    const MomentMeasureEstimate m = moment_measure_polyhedral(sup);
    const MomentMeasureEstimate v = surface_variant(m);
    for (std::size_t i = 0; i < m.size(); ++i)
        CHECK(v.weights[i] == doctest::Approx(m.weights[i]).epsilon(1e-12));
    CHECK(v.total == doctest::Approx(1.0).epsilon(1e-12));

    // (2/3, 1/3) at (-1, 2): nu proportional to (2/3, 2/3).
    const MomentMeasureEstimate skew =
        moment_measure_polyhedral(make_1d({{-1.0}, {2.0}}, {0.0, 0.0}));
    const MomentMeasureEstimate sv = surface_variant(skew);
    CHECK(sv.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sv.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sv.total == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

    // Gaussian cloud: total mass approx E|y| = sqrt(2/pi).
    const MomentMeasureEstimate g =
        moment_measure_sampled(gaussian_potential(1), 200000, 8);
    const MomentMeasureEstimate gv = surface_variant(g);
    const Statistic absstat =
        weighted_stat(g, [](const double* y) { return std::abs(y[0]); });
    CHECK(std::abs(gv.total - std::sqrt(2.0 / std::numbers::pi)) <=
          4.0 * absstat.se);
}

TEST_CASE("one-dimensional identity: gaussian and cube pairs, mismatch control") {
    AnalyticPotential gauss;
    gauss.dim = 1;
    gauss.name = "gaussian-normalized";
    const double log_c = 0.5 * std::log(2.0 * std::numbers::pi);
    gauss.psi = [log_c](const Vec& x) { return 0.5 * x[0] * x[0] + log_c; };
    gauss.grad = [](const Vec& x) { return Vec{x[0]}; };

    auto gauss_tail = [log_c](double y) { return std::exp(-0.5 * y * y - log_c); };
    std::vector<double> grid;
    for (double y = 0.2; y <= 2.0 + 1e-12; y += 0.05) grid.push_back(y);
    CHECK(one_dim_identity_residual(gauss, gauss_tail, grid) <= 1e-6);

    AnalyticPotential cube1;
    cube1.dim = 1;
    cube1.name = "cube-normalized";
    cube1.psi = [](const Vec& x) {
        return 2.0 * std::log(std::cosh(0.5 * x[0])) + std::log(4.0);
    };
    cube1.grad = [](const Vec& x) { return Vec{std::tanh(0.5 * x[0])}; };
    auto cube_tail = [](double y) { return (1.0 - y * y) / 4.0; };
    std::vector<double> grid2;
    for (double y = 0.1; y <= 0.9 + 1e-12; y += 0.02) grid2.push_back(y);
    CHECK(one_dim_identity_residual(cube1, cube_tail, grid2) <= 1e-6);

    // Mismatched pair: gaussian potential against the uniform tail moment.
    CHECK(one_dim_identity_residual(gauss, cube_tail, grid2) >= 0.1);
}

TEST_CASE("one-dimensional identity detects a non-monotone branch") {
    AnalyticPotential wiggle;
    wiggle.dim = 1;
    wiggle.psi = [](const Vec& x) { return std::cos(x[0]); };
    wiggle.grad = [](const Vec& x) { return Vec{-std::sin(x[0])}; };
    auto tail = [](double) { return 0.5; };
    CHECK_THROWS_AS(one_dim_identity_residual(wiggle, tail, {0.5}),
                    std::domain_error);
}
