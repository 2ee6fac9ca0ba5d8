#pragma once

#include <array>
#include <functional>
#include <vector>

#include "lamlab/util.hpp"

namespace lamlab {

/// Compactly supported (1,1) test form on the C^2 chart:
///   alpha = sum_{j,k} M_jk(x) dz_j ^ dzbar_k.
/// Coefficients must vanish outside the support; the edge function is >= 0
/// inside and lets quadrature split at the support boundary.
struct TestForm11 {
    using Coeffs = std::array<std::array<Complex, 2>, 2>;
    std::function<Coeffs(const CVec&)> coeff;
    std::function<double(const CVec&)> support_edge;  // may be null (whole box)
    double support_radius = 1.0;                      // bound on ||x|| over the support
    std::string label;
};

/// Degree-1 test form gamma = sum_j (u_j dz_j + v_j dzbar_j) with an
/// analytically coded exterior derivative. Only the (1,1) part of d(gamma)
/// is kept: the (2,0) and (0,2) parts pull back to zero on complex curves.
struct TestForm1 {
    // returns (u1, u2, v1, v2)
    std::function<std::array<Complex, 4>(const CVec&)> coeff;
    TestForm11 d11;
    std::string label;
};

namespace forms {

/// Polynomial bump (1 - ||x||^2/R^2)^3, cut at ||x|| = R.
inline double bump(const CVec& x, double R) {
    double s = 0.0;
    for (const auto& c : x) s += std::norm(c);
    s /= R * R;
    if (s >= 1.0) return 0.0;
    const double t = 1.0 - s;
    return t * t * t;
}

/// d(bump)/dz_j = -3 (1-s)^2 conj(x_j) / R^2; the zbar derivative is its
/// conjugate partner.
inline Complex bump_dz(const CVec& x, double R, int j) {
    double s = 0.0;
    for (const auto& c : x) s += std::norm(c);
    s /= R * R;
    if (s >= 1.0) return {};
    const double t = 1.0 - s;
    return -3.0 * t * t * std::conj(x[j]) / (R * R);
}

inline Complex bump_dzbar(const CVec& x, double R, int j) {
    double s = 0.0;
    for (const auto& c : x) s += std::norm(c);
    s /= R * R;
    if (s >= 1.0) return {};
    const double t = 1.0 - s;
    return -3.0 * t * t * x[j] / (R * R);
}

inline std::function<double(const CVec&)> ball_edge(double R) {
    return [R](const CVec& x) {
        double s = 0.0;
        for (const auto& c : x) s += std::norm(c);
        return R * R - s;
    };
}

/// Constant-coefficient (1,1) form M_jk dz_j ^ dzbar_k sharply cut to the
/// cylinder |z_1| <= R (the classic plaque-area test form).
inline TestForm11 cylinder_form(int j, int k, Complex value, double R) {
    TestForm11 f;
    f.coeff = [j, k, value, R](const CVec& x) {
        TestForm11::Coeffs m{};
        if (std::abs(x[0]) <= R) m[j][k] = value;
        return m;
    };
    f.support_edge = [R](const CVec& x) { return R - std::abs(x[0]); };
    f.support_radius = 1.0;
    f.label = "cylinder";
    return f;
}

/// Bump-times-monomial (1,1) form: entry (j,k) carries
/// B(x) z_1^p1 z_2^p2 conj(z_1)^q1 conj(z_2)^q2.
inline TestForm11 bump_monomial_form(int j, int k, int p1, int p2, int q1, int q2, double R) {
    TestForm11 f;
    f.coeff = [=](const CVec& x) {
        TestForm11::Coeffs m{};
        Complex v = bump(x, R);
        for (int t = 0; t < p1; ++t) v *= x[0];
        for (int t = 0; t < p2; ++t) v *= x[1];
        for (int t = 0; t < q1; ++t) v *= std::conj(x[0]);
        for (int t = 0; t < q2; ++t) v *= std::conj(x[1]);
        m[j][k] = v;
        return m;
    };
    f.support_edge = ball_edge(R);
    f.support_radius = R;
    f.label = "bump-monomial";
    return f;
}

/// Battery of (1,1) forms used by holonomy and linearity checks.
inline std::vector<TestForm11> test_battery(int count, double R) {
    std::vector<TestForm11> out;
    const int monos[5][4] = {{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {1, 0, 0, 1}};
    int mi = 0;
    while (static_cast<int>(out.size()) < count) {
        for (int j = 0; j < 2 && static_cast<int>(out.size()) < count; ++j)
            for (int k = 0; k < 2 && static_cast<int>(out.size()) < count; ++k) {
                const auto& m = monos[mi % 5];
                out.push_back(bump_monomial_form(j, k, m[0], m[1], m[2], m[3], R));
            }
        ++mi;
    }
    return out;
}

/// gamma = B(x) z_1^{p1} z_2^{p2} dz_j (or dzbar_j when bar is set), with the
/// (1,1) part of d(gamma) coded analytically:
///   d(u dz_j)    |-> M[j][k] -= du/dzbar_k
///   d(v dzbar_j) |-> M[k][j] += dv/dz_k
inline TestForm1 bump_one_form(int j, bool bar, int p1, int p2, double R) {
    TestForm1 g;
    auto poly = [p1, p2](const CVec& x) {
        Complex v = 1.0;
        for (int t = 0; t < p1; ++t) v *= x[0];
        for (int t = 0; t < p2; ++t) v *= x[1];
        return v;
    };
    auto poly_dz = [p1, p2, poly](const CVec& x, int k) -> Complex {
        // derivative of the holomorphic monomial factor
        const int p[2] = {p1, p2};
        if (p[k] == 0) return {};
        Complex v = static_cast<double>(p[k]);
        for (int t = 0; t < (k == 0 ? p1 - 1 : p1); ++t) v *= x[0];
        for (int t = 0; t < (k == 1 ? p2 - 1 : p2); ++t) v *= x[1];
        return v;
    };
    g.coeff = [=](const CVec& x) {
        std::array<Complex, 4> c{};
        const Complex u = bump(x, R) * poly(x);
        c[(bar ? 2 : 0) + j] = u;
        return c;
    };
    g.d11.coeff = [=](const CVec& x) {
        TestForm11::Coeffs m{};
        if (!bar) {
            // u dz_j, u = B * poly: du/dzbar_k = poly * dB/dzbar_k
            for (int k = 0; k < 2; ++k) m[j][k] = -(poly(x) * bump_dzbar(x, R, k));
        } else {
            // v dzbar_j: dv/dz_k = B * poly' + poly * dB/dz_k
            for (int k = 0; k < 2; ++k)
                m[k][j] = bump(x, R) * poly_dz(x, k) + poly(x) * bump_dz(x, R, k);
        }
        return m;
    };
    g.d11.support_edge = ball_edge(R);
    g.d11.support_radius = R;
    g.label = bar ? "bump dzbar" : "bump dz";
    return g;
}

inline std::vector<TestForm1> stokes_battery(double R) {
    std::vector<TestForm1> out;
    for (int j = 0; j < 2; ++j)
        for (int bar = 0; bar < 2; ++bar) {
            out.push_back(bump_one_form(j, bar != 0, 0, 0, R));
            out.push_back(bump_one_form(j, bar != 0, 1, 0, R));
            out.push_back(bump_one_form(j, bar != 0, 0, 1, R));
        }
    return out;
}

}  // namespace forms
}  // namespace lamlab
