#pragma once

#include "lamlab/cycle.hpp"

namespace lamlab {

/// Lelong-number probe: per-radius normalized ball masses
///   ratio(r) = ||T||_{B(center,r)} / ((2 pi)^q r^{2q})
/// and the extrapolated value of the fit ratio = nu + C r^2 on the two
/// smallest radii. A flat q-plane through the center sits at ratio 1.
struct LelongReport {
    std::vector<double> radii;   // decreasing
    std::vector<double> ratios;  // same order
    double estimate = 0.0;       // nu
    double model_error = 0.0;    // gap between the two smallest-radius fits
    bool resolution_warning = false;
};

inline LelongReport lelong(const FoliatedCycleLocal& T, const CVec& center,
                           std::vector<double> r_grid, const QuadOptions& opt = {}) {
    if (r_grid.size() < 2) throw std::invalid_argument("lelong: need at least two radii");
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        if (r_grid[i] >= r_grid[i - 1])
            throw std::invalid_argument("lelong: radii must be strictly decreasing");
    const int q = T.box.family.leaf_dim;
    if (static_cast<int>(center.size()) != q + T.box.family.codim)
        throw std::invalid_argument("lelong: center has the wrong dimension");

    LelongReport rep;
    rep.radii = r_grid;
    const double norm_pow = std::pow(2.0 * kPi, q);
    for (double r : r_grid) {
        const double mass = trace_mass(T, Region::ball(center, r), opt);
        rep.ratios.push_back(mass / (norm_pow * std::pow(r, 2 * q)));
    }
    // resolution: the boundary-splitting quadrature resolves features down to
    // about (domain radius) / (8 * order)
    rep.resolution_warning = r_grid.back() < 10.0 / (8.0 * opt.order);

    auto fit_pair = [&](std::size_t i_large, std::size_t i_small) {
        const double r1 = r_grid[i_large], r2 = r_grid[i_small];
        const double p1 = rep.ratios[i_large], p2 = rep.ratios[i_small];
        return (r1 * r1 * p2 - r2 * r2 * p1) / (r1 * r1 - r2 * r2);
    };
    const std::size_t n = r_grid.size();
    rep.estimate = fit_pair(n - 2, n - 1);
    rep.model_error = n >= 3 ? std::abs(rep.estimate - fit_pair(n - 3, n - 2)) : 0.0;
    return rep;
}

/// Both sides of the slice identity for the dilation A_lambda(z,w) = (z, lw)
/// on an n = 2 chart:
///   mass(T_lambda ^ i dz^dzbar over D(rho)^2) =
///   mass(T ^ i dz^dzbar over D(rho) x D(rho/lambda)).
/// Returns the relative gap; the two sides are computed independently.
inline double slice_invariance_check(const FoliatedCycleLocal& T, double lambda, double rho,
                                     const QuadOptions& opt = {}) {
    const PlaqueFamily& fam = T.box.family;
    if (fam.leaf_dim != 1 || fam.codim != 1)
        throw std::invalid_argument("slice_invariance_check: n = 2 charts only");
    if (lambda < 1.0) throw std::invalid_argument("slice_invariance_check: lambda must be >= 1");

    // i dz ^ dzbar pulls back to 2 dA on every plaque, so each side is twice
    // the area of the admitted z-region
    auto lhs_plaque = [&](const CVec& a) -> Complex {
        std::vector<std::function<double(Complex)>> edges;
        edges.emplace_back([&](Complex z) { return rho - std::abs(lambda * fam.eval(a, {z})[0]); });
        auto f = [&](Complex z) -> double {
            return std::abs(lambda * fam.eval(a, {z})[0]) <= rho ? 2.0 : 0.0;
        };
        return {integrate_disc_split<double>(Complex(0, 0), rho, f, edges, opt.order, 2 * opt.order),
                0.0};
    };
    auto rhs_plaque = [&](const CVec& a) -> Complex {
        const double cut = rho / lambda;
        std::vector<std::function<double(Complex)>> edges;
        edges.emplace_back([&](Complex z) { return cut - std::abs(fam.eval(a, {z})[0]); });
        auto f = [&](Complex z) -> double {
            return std::abs(fam.eval(a, {z})[0]) <= cut ? 2.0 : 0.0;
        };
        return {integrate_disc_split<double>(Complex(0, 0), rho, f, edges, opt.order, 2 * opt.order),
                0.0};
    };
    const double lhs = T.mu.integrate(lhs_plaque).real();
    const double rhs = T.mu.integrate(rhs_plaque).real();
    return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

}  // namespace lamlab
