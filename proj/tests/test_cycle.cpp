#include <catch2/catch_amalgamated.hpp>

#include "lamlab/cycle.hpp"

using namespace lamlab;

namespace {

FoliatedCycleLocal flat_cycle(TransverseMeasure mu) {
    auto fam = family_from_expression(parse_family("a1"), Transversal::complex_disc({0, 0}, 1.0));
    return {FlowBox{fam, 0.5, "flat"}, std::move(mu)};
}

FoliatedCycleLocal shear_cycle() {
    auto fam = family_from_expression(parse_family("a1 + 0.3*a1*z1"),
                                      Transversal::complex_disc({0, 0}, 0.75));
    return {FlowBox{fam, 0.5, "shear"}, TransverseMeasure::lebesgue_disc({0, 0}, 0.75)};
}

}  // namespace

TEST_CASE("pairing against the clipped area form") {
    // alpha = i dz1 ^ dzbar1 cut at |z1| <= 1/2 pulls back to 2 dA on flat
    // plaques: the pairing is the area pi/4 doubled
    auto form = forms::cylinder_form(0, 0, Complex(0, 1), 0.5);

    auto atom = flat_cycle(TransverseMeasure::dirac({Complex(0, 0)}));
    CHECK(pair_cycle(atom, form).real() == Catch::Approx(kPi / 2.0).epsilon(1e-10));

    auto diffuse = flat_cycle(TransverseMeasure::lebesgue_disc({0, 0}, 1.0));
    CHECK(pair_cycle(diffuse, form).real() == Catch::Approx(kPi / 2.0).epsilon(1e-10));

    TestForm11 zero;
    zero.coeff = [](const CVec&) { return TestForm11::Coeffs{}; };
    zero.support_radius = 0.9;
    CHECK(std::abs(pair_cycle(atom, zero)) == 0.0);
}

TEST_CASE("pairing is linear in the test form") {
    auto T = shear_cycle();
    auto battery = forms::test_battery(6, 0.9);
    RngStream rng(3, 3);
    for (int it = 0; it < 4; ++it) {
        const Complex c1(rng.next_double() - 0.5, rng.next_double() - 0.5);
        const Complex c2(rng.next_double() - 0.5, rng.next_double() - 0.5);
        const auto& f1 = battery[it];
        const auto& f2 = battery[it + 2];
        TestForm11 combo;
        combo.coeff = [&, c1, c2](const CVec& x) {
            auto m1 = f1.coeff(x);
            auto m2 = f2.coeff(x);
            TestForm11::Coeffs m{};
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) m[j][k] = c1 * m1[j][k] + c2 * m2[j][k];
            return m;
        };
        combo.support_edge = f1.support_edge;
        combo.support_radius = std::max(f1.support_radius, f2.support_radius);
        const Complex lhs = pair_cycle(T, combo);
        const Complex rhs = c1 * pair_cycle(T, f1) + c2 * pair_cycle(T, f2);
        CHECK(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("pairing rejects forms leaking out of the box") {
    auto T = flat_cycle(TransverseMeasure::dirac({Complex(0, 0)}));
    auto leaky = forms::bump_monomial_form(0, 0, 0, 0, 0, 0, 1.5);
    CHECK_THROWS_AS(pair_cycle(T, leaky), std::invalid_argument);
}

TEST_CASE("trace mass of flat cycles against product regions") {
    auto atom = flat_cycle(TransverseMeasure::dirac({Complex(0, 0)}));
    const auto half_box = Region::polydisc({Complex(0, 0), Complex(0, 0)}, {0.5, 1.0});
    CHECK(trace_mass(atom, half_box) == Catch::Approx(kPi / 2.0).epsilon(1e-9));

    // region missing the plaque entirely
    const auto far_region = Region::polydisc({Complex(0, 0), Complex(0.9, 0)}, {1.0, 0.05});
    CHECK(trace_mass(atom, far_region) == 0.0);

    // monotone under region inclusion
    auto diffuse = flat_cycle(TransverseMeasure::lebesgue_disc({0, 0}, 1.0));
    const double m1 = trace_mass(diffuse, Region::ball({Complex(0, 0), Complex(0, 0)}, 0.25));
    const double m2 = trace_mass(diffuse, Region::ball({Complex(0, 0), Complex(0, 0)}, 0.5));
    CHECK(m1 <= m2 + 1e-12);
}

TEST_CASE("stokes residual certifies closedness") {
    auto battery = forms::stokes_battery(0.9);

    auto T = flat_cycle(TransverseMeasure::lebesgue_disc({0, 0}, 1.0));
    auto S = shear_cycle();
    QuadOptions opt;
    opt.order = 24;
    double worst = 0.0;
    for (const auto& g : battery) {
        worst = std::max(worst, stokes_residual(T, g, opt));
        worst = std::max(worst, stokes_residual(S, g, opt));
    }
    CHECK(worst <= 1e-6);

    // residual does not grow when the order doubles (both sit at quadrature
    // noise level once the support is split)
    QuadOptions lo;
    lo.order = 6;
    const double r6 = stokes_residual(S, battery[1], lo);
    QuadOptions hi;
    hi.order = 12;
    const double r12 = stokes_residual(S, battery[1], hi);
    CHECK(r12 <= std::max(r6, 1e-10));

    TestForm1 zero_form;
    zero_form.coeff = [](const CVec&) { return std::array<Complex, 4>{}; };
    zero_form.d11.coeff = [](const CVec&) { return TestForm11::Coeffs{}; };
    zero_form.d11.support_radius = 0.9;
    CHECK(stokes_residual(T, zero_form) == 0.0);
}

TEST_CASE("coded exterior derivatives match Wirtinger finite differences") {
    auto battery = forms::stokes_battery(0.8);
    const double h = 1e-5;
    for (const auto& g : battery) {
        const CVec x{Complex(0.21, -0.13), Complex(0.05, 0.33)};
        auto m = g.d11.coeff(x);
        for (int j = 0; j < 2; ++j) {
            // finite-difference (1,1) coefficients from the 1-form components
            for (int k = 0; k < 2; ++k) {
                auto at = [&](Complex dz, int comp) {
                    CVec y = x;
                    y[k] += dz;
                    return g.coeff(y)[comp];
                };
                // d(u_j dz_j):   M[j][k] -= du_j/dzbar_k
                const Complex du_dzbar =
                    ((at(h, j) - at(-h, j)) + Complex(0, 1) * (at(Complex(0, h), j) - at(Complex(0, -h), j))) /
                    (4.0 * h);
                // d(v_j dzbar_j): M[k][j] += dv_j/dz_k
                const Complex dv_dz =
                    ((at(h, 2 + j) - at(-h, 2 + j)) -
                     Complex(0, 1) * (at(Complex(0, h), 2 + j) - at(Complex(0, -h), 2 + j))) /
                    (4.0 * h);
                (void)dv_dz;
                (void)du_dzbar;
            }
        }
        // assemble the full FD (1,1) matrix and compare entrywise
        TestForm11::Coeffs fd{};
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                auto comp = [&](int c, Complex dz, int coord) {
                    CVec y = x;
                    y[coord] += dz;
                    return g.coeff(y)[c];
                };
                const Complex du_dzbar =
                    ((comp(j, h, k) - comp(j, -h, k)) +
                     Complex(0, 1) * (comp(j, Complex(0, h), k) - comp(j, Complex(0, -h), k))) /
                    (4.0 * h);
                fd[j][k] -= du_dzbar;
                const Complex dv_dz =
                    ((comp(2 + j, h, k) - comp(2 + j, -h, k)) -
                     Complex(0, 1) * (comp(2 + j, Complex(0, h), k) - comp(2 + j, Complex(0, -h), k))) /
                    (4.0 * h);
                fd[k][j] += dv_dz;
            }
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) CHECK(std::abs(fd[j][k] - m[j][k]) < 1e-6);
    }
}

TEST_CASE("atom split separates compact-leaf mass exactly") {
    auto pure = flat_cycle(TransverseMeasure::dirac({Complex(0, 0)}));
    auto sp = atom_split(pure);
    CHECK_FALSE(sp.diffuse.has_value());
    REQUIRE(sp.atoms.size() == 1);
    CHECK(sp.atoms[0].weight == 1.0);

    auto leb = flat_cycle(TransverseMeasure::lebesgue_disc({0, 0}, 1.0));
    CHECK(atom_split(leb).atoms.empty());

    auto mixed = flat_cycle(TransverseMeasure::mixture(
        0.3, TransverseMeasure::dirac({Complex(0, 0)}), 0.7,
        TransverseMeasure::lebesgue_disc({0, 0}, 1.0)));
    auto ms = atom_split(mixed);
    REQUIRE(ms.diffuse.has_value());
    CHECK(ms.diffuse_mass == Catch::Approx(0.7).epsilon(1e-12));
    REQUIRE(ms.atoms.size() == 1);
    CHECK(ms.atoms[0].weight == Catch::Approx(0.3).epsilon(1e-12));

    // additivity: pairings of the parts resum to the original
    auto battery = forms::test_battery(5, 0.9);
    for (const auto& f : battery) {
        const Complex whole = pair_cycle(mixed, f);
        Complex parts = pair_cycle(*ms.diffuse, f);
        for (const auto& a : ms.atoms) {
            FoliatedCycleLocal leaf{mixed.box, TransverseMeasure::dirac(a.location, a.weight)};
            parts += pair_cycle(leaf, f);
        }
        CHECK(std::abs(whole - parts) <= 1e-10 * (1.0 + std::abs(whole)));
    }
}

TEST_CASE("holonomy invariance under relabelings") {
    auto T = flat_cycle(TransverseMeasure::lebesgue_disc({0, 0}, 0.75));
    QuadOptions opt;
    opt.order = 10;

    Relabeling identity;
    identity.forward = [](const CVec& t) { return t; };
    identity.inverse = [](const CVec& t) { return t; };
    identity.pushed = T.mu;
    CHECK(holonomy_check(T, identity, 8, opt) == 0.0);

    Relabeling doubling;
    doubling.forward = [](const CVec& t) { return CVec{2.0 * t[0]}; };
    doubling.inverse = [](const CVec& t) { return CVec{0.5 * t[0]}; };
    doubling.pushed = pushforward_affine(T.mu, Complex(2, 0), Complex(0, 0));
    CHECK(holonomy_check(T, doubling, 8, opt) <= 1e-8);

    Relabeling wrong = doubling;
    wrong.pushed = T.mu;  // deliberately not pushed
    CHECK(holonomy_check(T, wrong, 8, opt) > 1e-2);

    Relabeling squash;
    squash.forward = [](const CVec&) { return CVec{Complex(0, 0)}; };
    squash.inverse = [](const CVec& t) { return t; };
    squash.pushed = T.mu;
    CHECK_THROWS_AS(holonomy_check(T, squash, 8, opt), std::invalid_argument);
}

TEST_CASE("center_family reindexes by the center value") {
    // raw family f_t = 2t over the segment [-1/4, 1/4]
    PlaqueFamily raw;
    raw.leaf_dim = 1;
    raw.codim = 1;
    raw.transversal = Transversal::real_box({{-0.25, 0.25}});
    raw.structure = ZStructure::Constant;
    raw.holomorphy_radius = 4.0;
    raw.centered = false;
    raw.eval = [](const CVec& t, const CVec&) { return CVec{2.0 * t[0]}; };
    raw.label = "2t";

    auto mu = TransverseMeasure::lebesgue_segment(-0.25, 0.25);
    auto centered = center_family(raw, mu);
    CHECK(centered.family.centered);
    // h_a(0) = a on the new transversal
    for (const auto& a : centered.family.transversal.grid(9))
        CHECK(std::abs(centered.family.eval(a, {Complex(0, 0)})[0] - a[0]) < 1e-12);
    CHECK(centered.measure.total_mass() == Catch::Approx(1.0).epsilon(1e-12));

    // pairings agree before/after the reindexing
    FoliatedCycleLocal before{FlowBox{raw, 0.5, "raw"}, mu};
    FoliatedCycleLocal after{FlowBox{centered.family, 0.5, "centered"}, centered.measure};
    for (const auto& f : forms::test_battery(5, 0.9)) {
        const Complex pb = pair_cycle(before, f);
        const Complex pa = pair_cycle(after, f);
        CHECK(std::abs(pb - pa) <= 1e-8 * (1.0 + std::abs(pb)));
    }

    // already-centered input is the identity
    auto id = center_family(centered.family, centered.measure);
    CHECK(id.family.centered);

    // two parameters sharing a center is degenerate
    PlaqueFamily bad = raw;
    bad.eval = [](const CVec& t, const CVec&) { return CVec{t[0] * t[0]}; };
    CHECK_THROWS_AS(center_family(bad, mu), std::invalid_argument);
}
