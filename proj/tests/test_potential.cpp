#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "moments/potential.hpp"

using namespace moments;

namespace {

PolyhedralPotential two_atom_1d(double v0 = 0.0, double v1 = 0.0) {
    PolyhedralPotential p;
    p.dim = 1;
    p.atoms = {{-1.0}, {1.0}};
    p.values = {v0, v1};
    return p;
}

PolyhedralPotential sup_norm_2d(double v0 = 0.0) {
    PolyhedralPotential p;
    p.dim = 2;
    p.atoms = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    p.values = {v0, 0.0, 0.0, 0.0};
    return p;
}

}  // namespace

TEST_CASE("eval picks the max with lowest-index ties") {
    const PolyhedralPotential p = two_atom_1d();
    const EvalResult a = eval(p, {2.0});
    CHECK(a.value == doctest::Approx(2.0));
    CHECK(a.argmax == 1);
    const EvalResult b = eval(p, {0.0});
    CHECK(b.value == doctest::Approx(0.0));
    CHECK(b.argmax == 0);

    const PolyhedralPotential q = sup_norm_2d();
    const EvalResult c = eval(q, {0.3, 0.7});
    CHECK(c.value == doctest::Approx(0.7));
    CHECK(c.argmax == 2);
}

TEST_CASE("subgradient returns the argmax atom") {
    const PolyhedralPotential p = two_atom_1d();
    CHECK(subgradient(p, {2.0})[0] == doctest::Approx(1.0));
    CHECK(subgradient(p, {-3.0})[0] == doctest::Approx(-1.0));
    const PolyhedralPotential q = sup_norm_2d();
    const Vec g = subgradient(q, {0.3, 0.7});
    CHECK(g[0] == doctest::Approx(0.0));
    CHECK(g[1] == doctest::Approx(1.0));
}

TEST_CASE("conjugate_at equals the lower envelope of the data") {
    CHECK(conjugate_at(two_atom_1d(), {0.0}) == doctest::Approx(0.0));
    // Hand-solved two-variable program: lambda = (1/2, 1/2).
    CHECK(conjugate_at(two_atom_1d(0.0, 2.0), {0.0}) == doctest::Approx(1.0));
    CHECK(conjugate_at(two_atom_1d(), {2.0}) == kInfinity);
}

TEST_CASE("conjugate_at LP path agrees with hand values in 2D") {
    PolyhedralPotential p;
    p.dim = 2;
    p.atoms = {{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    p.values = {0.0, 1.0, 0.0, 5.0, 5.0};
    // Envelope along the segment between the first and third atom.
    CHECK(conjugate_at(p, {0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(conjugate_at(p, {0.5, 0.0}) == doctest::Approx(0.0));
    CHECK(conjugate_at(p, {2.0, 0.0}) == kInfinity);
    // Midpoint of atom 0 and atom 3: best split is (1/2, 1/2).
    CHECK(conjugate_at(p, {-0.5, 0.5}) == doctest::Approx(2.5));
}

TEST_CASE("active_set flags lifted points on the lower hull") {
    PolyhedralPotential p;
    p.dim = 1;
    p.atoms = {{-1.0}, {0.0}, {1.0}};

    p.values = {0.0, 0.0, 0.0};  // collinear: middle degenerate-active
    CHECK(active_set(p) == std::vector<int>{0, 1, 2});

    p.values = {0.0, 1.0, 0.0};  // middle above the chord
    CHECK(active_set(p) == std::vector<int>{0, 2});

    p.values = {0.0, -1.0, 0.0};  // strictly convex data
    CHECK(active_set(p) == std::vector<int>{0, 1, 2});
}

TEST_CASE("apply_gauge shifts values and evaluation covariantly") {
    const PolyhedralPotential p = two_atom_1d();
    const PolyhedralPotential id = apply_gauge(p, {{0.0}, 0.0});
    CHECK(id.values[0] == 0.0);
    CHECK(id.values[1] == 0.0);

    const PolyhedralPotential t = apply_gauge(p, {{1.0}, 0.0});
    CHECK(t.values[0] == doctest::Approx(-1.0));
    CHECK(t.values[1] == doctest::Approx(1.0));
    CHECK(eval(t, {1.0}).value == doctest::Approx(0.0));

    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const GaugeTransform g{{rng.uniform(-2, 2)}, rng.uniform(-2, 2)};
        const PolyhedralPotential q = apply_gauge(p, g);
        const double x = rng.uniform(-3, 3);
        CHECK(eval(q, {x}).value ==
              doctest::Approx(eval(p, {x - g.translation[0]}).value - g.constant));
    }
}

TEST_CASE("active_set is gauge invariant") {
    PolyhedralPotential p;
    p.dim = 2;
    p.atoms = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}, {0.1, 0.2}};
    p.values = {0.0, 0.0, 0.0, 0.0, 0.5};
    const auto before = active_set(p);
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const GaugeTransform g{{rng.uniform(-1, 1), rng.uniform(-1, 1)},
                               rng.uniform(-1, 1)};
        CHECK(active_set(apply_gauge(p, g)) == before);
    }
}

TEST_CASE("convexity holds on random triples") {
    PolyhedralPotential p;
    p.dim = 2;
    Rng rng(3);
    for (int i = 0; i < 9; ++i) {
        p.atoms.push_back({rng.normal(), rng.normal()});
        p.values.push_back(rng.uniform(-1, 1));
    }
    for (int trial = 0; trial < 200; ++trial) {
        const Vec x{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const Vec y{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const double l = rng.uniform();
        const Vec mid{l * x[0] + (1 - l) * y[0], l * x[1] + (1 - l) * y[1]};
        CHECK(eval(p, mid).value <=
              l * eval(p, x).value + (1 - l) * eval(p, y).value + 1e-12);
    }
}

TEST_CASE("Fenchel-Young inequality with equality on cells") {
    const PolyhedralPotential p = sup_norm_2d();
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec x{rng.uniform(-4, 4), rng.uniform(-4, 4)};
        const EvalResult e = eval(p, x);
        for (int i = 0; i < p.size(); ++i) {
            const double fy = conjugate_at(p, p.atoms[i]) + e.value - dot(p.atoms[i], x);
            CHECK(fy >= -1e-12);
            if (i == e.argmax) CHECK(fy == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("check_integrability witnesses") {
    CHECK(check_integrability(two_atom_1d()).integrable);
    CHECK(check_integrability(two_atom_1d()).alpha == doctest::Approx(1.0));

    PolyhedralPotential off;
    off.dim = 1;
    off.atoms = {{1.0}, {2.0}};
    off.values = {0.0, 0.0};
    CHECK_FALSE(check_integrability(off).integrable);

    const IntegrabilityWitness w = check_integrability(sup_norm_2d());
    CHECK(w.integrable);
    // Direction-grid oracle for min_theta max_i y_i.theta.
    double oracle = kInfinity;
    for (int k = 0; k < 100000; ++k) {
        const double th = 2.0 * 3.14159265358979323846 * k / 100000;
        const double c = std::cos(th), s = std::sin(th);
        const double h = std::max(std::max(c, -c), std::max(s, -s));
        oracle = std::min(oracle, h);
    }
    CHECK(w.alpha == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(w.alpha == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("integrability witness in dimension 3 via facet enumeration") {
    PolyhedralPotential p;
    p.dim = 3;
    // Octahedron vertices: the facet planes sit at distance 1/sqrt(3).
    for (int k = 0; k < 3; ++k) {
        Vec a(3, 0.0), b(3, 0.0);
        a[k] = 1.0;
        b[k] = -1.0;
        p.atoms.push_back(a);
        p.atoms.push_back(b);
    }
    p.values.assign(6, 0.25);
    const IntegrabilityWitness w = check_integrability(p);
    CHECK(w.integrable);
    CHECK(w.exact);
    CHECK(w.alpha == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(w.beta == doctest::Approx(0.25));
}

TEST_CASE("potential validation rejects malformed data") {
    PolyhedralPotential p;
    p.dim = 1;
    p.atoms = {{0.0}, {0.0}};
    p.values = {0.0, 0.0};
    CHECK_THROWS_AS(validate_potential(p), std::invalid_argument);
    p.atoms = {{0.0}};
    p.values = {0.0, 1.0};
    CHECK_THROWS_AS(validate_potential(p), std::invalid_argument);
}
