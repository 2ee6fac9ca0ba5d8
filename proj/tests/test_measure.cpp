#include <catch2/catch_amalgamated.hpp>

#include "lamlab/cycle.hpp"
#include "lamlab/measure.hpp"

using namespace lamlab;

TEST_CASE("integrate_measure on the three variants") {
    auto delta = TransverseMeasure::dirac({Complex(0, 0)});
    CHECK(std::abs(delta.integrate([](const CVec& x) { return x[0]; })) == 0.0);

    auto leb = TransverseMeasure::lebesgue_disc({0, 0}, 1.0);
    CHECK(leb.integrate_real([](const CVec&) { return 1.0; }) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(leb.integrate([](const CVec& x) { return x[0]; })) < 1e-13);

    // Cantor measure on [0,1]: E[x] = 1/2 by the symmetry of the digit
    // expansion
    auto cant = TransverseMeasure::cantor(0.0, 1.0, 10);
    CHECK(cant.integrate([](const CVec& x) { return x[0]; }).real() ==
          Catch::Approx(0.5).epsilon(1e-13));
    CHECK(cant.integrate_real([](const CVec&) { return 1.0; }) == Catch::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("cantor depth above 30 is a resource error") {
    CHECK_THROWS_AS(TransverseMeasure::cantor(0.0, 1.0, 31), std::runtime_error);
}

TEST_CASE("asymmetric cantor branch weights shift the mean") {
    auto cant = TransverseMeasure::cantor(0.0, 1.0, 12, 0.25, 0.75);
    // E[x] = sum_k (2/3^k) E[digit] with E[digit] = 3/4, so E[x] = 3/4
    CHECK(cant.integrate([](const CVec& x) { return x[0]; }).real() ==
          Catch::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("mixtures keep the mass bookkeeping exact") {
    auto mix = TransverseMeasure::mixture(0.3, TransverseMeasure::dirac({Complex(0, 0)}), 0.7,
                                          TransverseMeasure::lebesgue_disc({0, 0}, 1.0));
    CHECK(mix.total_mass() == Catch::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(mix.diffuse());
    CHECK(TransverseMeasure::lebesgue_disc({0, 0}, 1.0).diffuse());
    CHECK(TransverseMeasure::cantor(0, 1).diffuse());
}

TEST_CASE("pushforward by an affine map preserves integrals") {
    auto seg = TransverseMeasure::lebesgue_segment(-0.5, 0.5);
    auto pushed = pushforward_affine(seg, Complex(2, 0), Complex(0.25, 0));
    auto f = [](const CVec& x) { return x[0] * x[0] + 1.5; };
    const Complex lhs = pushed.integrate(f);
    const Complex rhs = seg.integrate([&](const CVec& x) { return f({2.0 * x[0] + 0.25}); });
    CHECK(std::abs(lhs - rhs) < 1e-12);

    auto disc = TransverseMeasure::lebesgue_disc({0, 0}, 0.75);
    auto pd = pushforward_affine(disc, Complex(0, 2), Complex(0, 0));
    CHECK(pd.total_mass() == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(pd.densities[0].domain.radii[0] == Catch::Approx(1.5));
}

TEST_CASE("measure sampling is deterministic per stream") {
    auto mix = TransverseMeasure::mixture(0.5, TransverseMeasure::lebesgue_disc({0, 0}, 1.0), 0.5,
                                          TransverseMeasure::cantor(-0.5, 0.5));
    RngStream r1(9, 1), r2(9, 1);
    for (int i = 0; i < 32; ++i) {
        CHECK(mix.sample(r1)[0] == mix.sample(r2)[0]);
    }
}

TEST_CASE("product measure of point masses") {
    auto pm = product_measure(TransverseMeasure::dirac({Complex(0, 0)}));
    RngStream rng(1, 1);
    auto [a1, a2] = pm.sample(rng);
    CHECK(std::abs(a1[0]) == 0.0);
    CHECK(std::abs(a2[0]) == 0.0);
    auto d = pm.diagonal_mass(0.01);
    CHECK(d.exact);
    CHECK(d.value == 1.0);
}

TEST_CASE("product measure of two atoms enumerates four pairs") {
    auto mu = TransverseMeasure::atoms(
        {Atom{{Complex(-0.25, 0)}, 0.5}, Atom{{Complex(0.25, 0)}, 0.5}});
    auto pm = product_measure(mu);
    // pairs with alpha2 = 0 carry weight 1/2; the +-1/2 offsets carry 1/4 each
    CHECK(pm.diagonal_mass(0.01).value == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(pm.diagonal_mass(0.6).value == Catch::Approx(1.0).epsilon(1e-14));
}

namespace {

/// Independent oracle for the unit-disc uniform pair-distance law:
/// P(|a-b| <= eps) integrated from the classical density
/// f(t) = 2t (2/pi) (acos(t/2) - (t/2) sqrt(1-t^2/4)).
double disc_distance_cdf(double eps) {
    const int n = 40000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t0 = eps * i / n, t1 = eps * (i + 1) / n, tm = 0.5 * (t0 + t1);
        auto f = [](double t) {
            return 2.0 * t * (2.0 / kPi) * (std::acos(0.5 * t) - 0.5 * t * std::sqrt(1.0 - 0.25 * t * t));
        };
        acc += (t1 - t0) * (f(t0) + 4.0 * f(tm) + f(t1)) / 6.0;
    }
    return acc;
}

}  // namespace

TEST_CASE("diagonal mass of the Lebesgue product matches the analytic law") {
    auto pm = product_measure(TransverseMeasure::lebesgue_disc({0, 0}, 1.0));
    for (double eps : {0.5, 0.25, 0.125}) {
        auto d = pm.diagonal_mass(eps, 65536, 42);
        const double expect = disc_distance_cdf(eps);
        CHECK_FALSE(d.exact);
        CHECK(d.standard_error > 0.0);
        CHECK(std::abs(d.value - expect) <= 3.0 * d.standard_error + 1e-9);
    }
}

TEST_CASE("interior stratum of the Lebesgue product follows the eps^2 law") {
    // conditioned on |a| <= 1/2 the eps-ball around a stays inside the disc,
    // so P(|b-a| <= eps | |a| <= 1/2) = eps^2 exactly
    auto mu = TransverseMeasure::lebesgue_disc({0, 0}, 1.0);
    RngStream rng(7, 0);
    for (double eps : {0.5, 0.25}) {
        int hits = 0, in_stratum = 0;
        for (int i = 0; i < 65536; ++i) {
            const CVec a = mu.sample(rng);
            const CVec b = mu.sample(rng);
            if (std::abs(a[0]) > 0.5) continue;
            ++in_stratum;
            if (std::abs(b[0] - a[0]) <= eps) ++hits;
        }
        const double p = double(hits) / in_stratum;
        const double sigma = std::sqrt(eps * eps * (1 - eps * eps) / in_stratum);
        CHECK(std::abs(p - eps * eps) <= 3.0 * sigma + 1e-9);
    }
}

TEST_CASE("cantor diagonal mass is exactly 2^-k at eps = 3^-k") {
    // cylinders at depth k have diameter 3^-k and pairwise gaps >= 3^-k, so
    // M{|x-y| <= 3^-k} = sum over depth-k cylinders of (2^-k)^2 = 2^-k
    // eps = 3^-k sits strictly between the in-cylinder maximum 3^-k - 3^-12
    // and the cross-gap minimum 3^-k + 3^-12
    auto pm = product_measure(TransverseMeasure::cantor(0.0, 1.0, 12));
    double prev = 2.0;
    for (int k = 1; k <= 6; ++k) {
        auto d = pm.diagonal_mass(std::pow(3.0, -k));
        CHECK(d.exact);
        CHECK(d.value == Catch::Approx(std::pow(2.0, -k)).epsilon(1e-12));
        CHECK(d.value < prev);
        prev = d.value;
    }
}

TEST_CASE("diagonal mass decreases to zero for diffuse measures") {
    auto pm = product_measure(TransverseMeasure::lebesgue_disc({0, 0}, 1.0));
    double prev = 2.0;
    for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
        const double v = pm.diagonal_mass(eps, 32768, 9).value;
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 0.02);
}
