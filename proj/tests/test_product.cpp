#include <catch2/catch_amalgamated.hpp>

#include "lamlab/inequality.hpp"
#include "lamlab/product_family.hpp"

using namespace lamlab;

namespace {

PlaqueFamily flat_family() {
    return family_from_expression(parse_family("a1"), Transversal::complex_disc({0, 0}, 1.0));
}

PlaqueFamily shear_family() {
    return family_from_expression(parse_family("a1 + 0.3*a1*z1"),
                                  Transversal::complex_disc({0, 0}, 0.75));
}

Region default_K() {
    return Region::polydisc(CVec(4, Complex(0, 0)), {0.5, 0.5, 0.5, 0.5});
}

}  // namespace

TEST_CASE("disc intersection area against a counting oracle") {
    RngStream rng(5, 5);
    for (int trial = 0; trial < 4; ++trial) {
        const double r1 = 0.3 + 0.5 * rng.next_double();
        const double r2 = 0.2 + 0.5 * rng.next_double();
        const double d = 1.2 * rng.next_double();
        const double exact = disc_intersection_area(d, r1, r2);
        // midpoint counting over a bounding box
        const int n = 600;
        const double L = r1 + 1e-12;
        long hits = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double x = -L + 2.0 * L * (i + 0.5) / n;
                const double y = -L + 2.0 * L * (j + 0.5) / n;
                if (x * x + y * y <= r1 * r1 && (x - d) * (x - d) + y * y <= r2 * r2) ++hits;
            }
        const double approx = hits * (2.0 * L / n) * (2.0 * L / n);
        CHECK(std::abs(exact - approx) < 0.02 * (0.1 + exact));
    }
    CHECK(disc_intersection_area(2.0, 0.5, 0.5) == 0.0);
    CHECK(disc_intersection_area(0.0, 0.3, 0.5) == Catch::Approx(kPi * 0.09).epsilon(1e-12));
}

TEST_CASE("build_product on the flat pencil gives constant components") {
    auto P = build_product(flat_family(), 0.5);
    RngStream rng(1, 2);
    for (int it = 0; it < 16; ++it) {
        const CVec a1{rng.next_in_disc({0, 0}, 0.4)};
        const CVec a2{rng.next_in_disc({0, 0}, 0.4)};
        const CVec zp{rng.next_in_disc({0, 0}, 0.5)};
        const CVec wp{rng.next_in_disc({0, 0}, 0.5)};
        CHECK(std::abs(P.f(a1, zp)[0] - a1[0]) < 1e-15);
        CHECK(std::abs(P.g(a1, a2, zp, wp)[0] - a2[0]) < 1e-15);
    }
}

TEST_CASE("build_product shear components match the algebraic expansion") {
    const double k = 0.3;
    auto P = build_product(shear_family(), 0.5);
    RngStream rng(2, 3);
    for (int it = 0; it < 32; ++it) {
        const Complex a1 = rng.next_in_disc({0, 0}, 0.35);
        const Complex a2 = rng.next_in_disc({0, 0}, 0.35);
        const Complex zp = rng.next_in_disc({0, 0}, 0.5);
        const Complex wp = rng.next_in_disc({0, 0}, 0.5);
        // g = a2 (1 + k (z'+w')) + k a1 w'
        const Complex expect = a2 * (1.0 + k * (zp + wp)) + k * a1 * wp;
        CHECK(std::abs(P.g({a1}, {a2}, {zp}, {wp})[0] - expect) < 1e-14);
    }
}

TEST_CASE("build_product rejects bad inputs and broken structure") {
    auto decentered = flat_family();
    decentered.centered = false;
    CHECK_THROWS_AS(build_product(decentered, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(build_product(flat_family(), 0.7), std::invalid_argument);

    // family lying about its centering: property (1) must catch it
    PlaqueFamily liar = flat_family();
    liar.eval = [](const CVec& a, const CVec&) { return CVec{2.0 * a[0]}; };
    try {
        build_product(liar, 0.5);
        FAIL("expected a property violation");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("property (1)") != std::string::npos);
    }
}

TEST_CASE("rescaled mass of the flat pencil hits the closed forms") {
    auto P = build_product(flat_family(), 0.5);
    const Region K = default_K();

    for (double lambda : {1.0, 4.0, 64.0}) {
        CHECK(rescaled_graph_mass(P, {Complex(0, 0)}, {Complex(0, 0)}, lambda, K) ==
              Catch::Approx(kPi * kPi / 2.0).epsilon(1e-12));
    }
    // graph leaves K when |lambda alpha2| > 1/2
    CHECK(rescaled_graph_mass(P, {Complex(0, 0)}, {Complex(0.2, 0)}, 4.0, K) == 0.0);
    CHECK(rescaled_graph_mass(P, {Complex(0.1, 0)}, {Complex(0.1, 0)}, 8.0, K) == 0.0);
    // |alpha1| outside the z''-block of K
    CHECK(rescaled_graph_mass(P, {Complex(0.7, 0)}, {Complex(0, 0)}, 2.0, K) == 0.0);
}

TEST_CASE("alpha2 = 0 graphs are dilation invariant for affine families") {
    const Region K = default_K();
    for (auto fam : {flat_family(), shear_family()}) {
        auto P = build_product(fam, 0.5);
        const CVec a1{Complex(0.22, -0.14)};
        const double m1 = rescaled_graph_mass(P, a1, {Complex(0, 0)}, 1.0, K);
        for (double lambda : {2.0, 16.0, 128.0}) {
            const double ml = rescaled_graph_mass(P, a1, {Complex(0, 0)}, lambda, K);
            CHECK(ml == Catch::Approx(m1).epsilon(1e-9));
        }
    }
}

TEST_CASE("affine fast path agrees with the generic quadrature route") {
    auto P = build_product(shear_family(), 0.5);
    const Region K = default_K();
    RngStream rng(77, 1);
    RescaledMassOptions fast;
    fast.order = 12;
    for (int it = 0; it < 6; ++it) {
        const CVec a1{rng.next_in_disc({0, 0}, 0.5)};
        const CVec a2{rng.next_in_disc({0, 0}, 0.25 / (1.0 + it))};
        const double lambda = 1.0 + 3.0 * rng.next_double();
        const double m_fast = rescaled_graph_mass(P, a1, a2, lambda, K, fast);

        ProductFamily Pg = P;
        Pg.base.structure = ZStructure::Generic;
        RescaledMassOptions slow;
        slow.generic_order = 12;
        const double m_slow = rescaled_graph_mass(Pg, a1, a2, lambda, K, slow);
        INFO("fast " << m_fast << " slow " << m_slow);
        CHECK(std::abs(m_fast - m_slow) <= 2e-3 * (0.05 + std::max(m_fast, m_slow)));
    }
}

TEST_CASE("constant fast path agrees with the generic route on the flat pencil") {
    auto P = build_product(flat_family(), 0.5);
    const Region K = default_K();
    const double m_fast = rescaled_graph_mass(P, {Complex(0.2, 0.1)}, {Complex(0.05, 0)}, 2.0, K);
    ProductFamily Pg = P;
    Pg.base.structure = ZStructure::Generic;
    RescaledMassOptions slow;
    slow.generic_order = 12;
    const double m_slow = rescaled_graph_mass(Pg, {Complex(0.2, 0.1)}, {Complex(0.05, 0)}, 2.0, K, slow);
    CHECK(std::abs(m_fast - m_slow) <= 1e-6 * (1.0 + m_fast));
}

TEST_CASE("fit_inequality on the flat pencil pins the exact constants") {
    auto P = build_product(flat_family(), 0.5);
    auto fit = fit_inequality(P, 0.4, 128, 42);
    CHECK(fit.c3 == 1.0);
    CHECK(fit.c1 == 1.0);
    CHECK(fit.c2 == 0.0);
    CHECK(fit.k_deriv == 0.0);
    CHECK(fit.worst_slack >= 0.0);
}

TEST_CASE("fit_inequality on the shear is positive, finite and stable") {
    auto P = build_product(shear_family(), 0.5);
    auto f1 = fit_inequality(P, 0.4, 256, 42);
    auto f2 = fit_inequality(P, 0.4, 512, 42);
    CHECK(f1.c1 > 0.0);
    CHECK(f1.c3 >= f1.c1);
    CHECK(std::isfinite(f1.c3));
    CHECK(std::abs(f2.c3 - f1.c3) <= 0.1 * std::max(f1.c3, f2.c3));
    CHECK(std::abs(f2.c1 - f1.c1) <= 0.1 * std::max(f1.c1, f2.c1));
    CHECK(f1.worst_slack >= 0.0);
    // analytic window: c1 >= 1 - k rho and c3 <= 1 + something modest
    CHECK(f1.c1 >= 1.0 - 0.3 * 0.5 - 0.05);
    CHECK(f1.c3 <= 1.6);
}

TEST_CASE("fit_inequality rejects a non-Lipschitz family with a witness") {
    // h_a(z) = a + 0.5 sqrt(a) z on [0, 1/4]: centered, holomorphic in z,
    // but the transverse dependence is not Lipschitz at a = 0
    PlaqueFamily fam;
    fam.leaf_dim = 1;
    fam.codim = 1;
    fam.transversal = Transversal::real_box({{0.0, 0.25}});
    fam.holomorphy_radius = 4.0;
    fam.structure = ZStructure::Generic;
    fam.centered = true;
    fam.eval = [](const CVec& a, const CVec& z) {
        return CVec{a[0] + 0.5 * std::sqrt(std::abs(a[0])) * z[0]};
    };
    fam.label = "sqrt-shear";
    auto P = build_product(fam, 0.5);
    CHECK_THROWS_AS(fit_inequality(P, 0.4, 256, 42), FitDiagnosticError);
}

TEST_CASE("far_mass_zero_box instantiates the lemma box") {
    InequalityFit fit;
    fit.c1 = 1.0;
    auto K = far_mass_zero_box(fit, 1.0);
    REQUIRE(K.radii.size() == 4);
    CHECK(K.radii[0] == 0.5);
    CHECK(K.radii[1] == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(K.radii[2] == 0.5);
    CHECK(K.radii[3] == 0.5);

    auto K0 = far_mass_zero_box(fit, 0.0);
    CHECK(K0.radii == std::vector<double>{0.5, 0.5, 0.5, 0.5});
}

TEST_CASE("far-stratum rescaled plaques carry no mass on the lemma box") {
    for (auto fam : {flat_family(), shear_family()}) {
        auto P = build_product(fam, 0.5);
        auto fit = fit_inequality(P, 0.5, 256, 7);
        const double k = fit.k_deriv * fit.alpha_max;
        const Region Kstar = far_mass_zero_box(fit, k);
        RngStream rng(123, 9);
        int tested = 0;
        while (tested < 300) {
            const Complex a = P.base.transversal.sample(rng)[0];
            const Complex b = P.base.transversal.sample(rng)[0];
            const double lambda = 1.0 + 63.0 * rng.next_double();
            if (std::abs(b - a) <= 1.0 / lambda) continue;  // far stratum only
            const double m = rescaled_graph_mass(P, {a}, {b - a}, lambda, Kstar);
            CHECK(m == 0.0);
            ++tested;
        }
    }
}
