#pragma once

#include "lamlab/family.hpp"
#include "lamlab/graph_mass.hpp"

namespace lamlab {

/// Area of the intersection of two discs with center distance d.
inline double disc_intersection_area(double d, double r1, double r2) {
    if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return kPi * r * r;
    }
    const double a1 = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
    const double a2 = std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0);
    const double tri = 0.5 * std::sqrt(std::max(
                                 0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)));
    return r1 * r1 * std::acos(a1) + r2 * r2 * std::acos(a2) - tri;
}

/// Self-product of a centered family in diagonal-adapted coordinates
/// (z, w) = (x, y - x), parameters alpha = (a, b - a):
///   f_alpha(z', w') = h_{alpha1}(z'),
///   g_alpha(z', w') = h_{alpha1+alpha2}(z' + w') - h_{alpha1}(z').
struct ProductFamily {
    PlaqueFamily base;
    double rho = 0.5;

    [[nodiscard]] int q() const { return base.leaf_dim; }
    [[nodiscard]] int codim() const { return base.codim; }

    [[nodiscard]] CVec f(const CVec& alpha1, const CVec& zp) const { return base.eval(alpha1, zp); }

    [[nodiscard]] CVec g(const CVec& alpha1, const CVec& alpha2, const CVec& zp, const CVec& wp) const {
        return base.eval(alpha1 + alpha2, zp + wp) - base.eval(alpha1, zp);
    }
};

/// Build the product data and verify its structure on a sample grid.
inline ProductFamily build_product(const PlaqueFamily& h, double rho) {
    if (!h.centered) throw std::invalid_argument("build_product: the family must be centered");
    if (rho <= 0.0 || rho > 0.5)
        throw std::invalid_argument("build_product: rho must lie in (0, 1/2] so z'+w' stays holomorphic");
    if (2.0 * rho >= h.holomorphy_radius)
        throw std::invalid_argument("build_product: holomorphy radius too small for this rho");

    ProductFamily P{h, rho};
    const auto params = h.transversal.grid(16);
    CVec zero(h.leaf_dim, Complex(0, 0));

    // property (1): alpha = (f(0,0), g(0,0))
    for (const auto& a : params) {
        const CVec fv = P.f(a, zero);
        for (std::size_t j = 0; j < a.size(); ++j)
            if (std::abs(fv[j] - a[j]) > 1e-10)
                throw std::runtime_error("product family violates property (1): f(0,0) != alpha1");
    }
    for (std::size_t i = 0; i + 1 < params.size(); i += 2) {
        const CVec& a = params[i];
        const CVec a2 = params[i + 1] - params[i];
        const CVec gv = P.g(a, a2, zero, zero);
        for (std::size_t j = 0; j < a.size(); ++j)
            if (std::abs(gv[j] - a2[j]) > 1e-10)
                throw std::runtime_error("product family violates property (1): g(0,0) != alpha2");
    }

    // property (4): alpha2 = 0 gives g(z',0) == 0; alpha2 != 0 keeps it away
    // from zero at sampled points
    std::vector<CVec> zs;
    for (int i = 0; i < 16; ++i) zs.push_back({std::polar(rho * ((i % 4) + 1) / 4.0, 0.71 * i)});
    if (h.leaf_dim != 1) {
        zs.clear();
        for (int i = 0; i < 16; ++i) {
            CVec z(h.leaf_dim);
            for (int j = 0; j < h.leaf_dim; ++j) z[j] = std::polar(rho * ((i + j) % 4 + 1) / 4.0, 0.53 * i + 0.29 * j);
            zs.push_back(z);
        }
    }
    CVec wzero(h.leaf_dim, Complex(0, 0));
    for (const auto& a : params) {
        for (const auto& z : zs) {
            const CVec gv = P.g(a, CVec(a.size(), Complex(0, 0)), z, wzero);
            if (sup_norm(gv) > 1e-12)
                throw std::runtime_error("product family violates property (4): g(z',0) != 0 at alpha2 = 0");
        }
    }
    for (std::size_t i = 0; i + 1 < params.size(); i += 2) {
        const CVec& a = params[i];
        const CVec a2 = params[i + 1] - params[i];
        if (sup_norm(a2) < 1e-9) continue;
        for (const auto& z : zs) {
            const CVec gv = P.g(a, a2, z, wzero);
            if (sup_norm(gv) <= 1e-13 * std::max(1.0, sup_norm(a2)))
                throw std::runtime_error(
                    "product family violates property (4): g(z',0) vanishes at alpha2 != 0");
        }
    }
    // property (3) is structural: f reads only alpha1 by construction.
    return P;
}

/// Mass of (A_lambda)_* [Gamma_alpha] over the compact polydisc K, computed
/// as the trace mass of the rescaled graph
///   (z', w') -> (f_alpha(z'), lambda g_alpha(z', w'/lambda))
/// over { ||z'|| < rho, ||w'|| < lambda rho } clipped to K. Coordinates of K
/// are ordered (z', w', z'', w'').
struct RescaledMassOptions {
    int order = 8;  // base quadrature order for the fast paths
    int generic_order = 10;
    int jacobian_nodes = 16;
};

namespace detail {

struct KSplit {
    // per-block centers/radii of the polydisc K in (z', w', z'', w'') order
    CVec cz, cw, cf, cg;
    std::vector<double> rz, rw, rf, rg;
};

inline KSplit split_region(const Region& K, int q, int codim) {
    if (K.kind != RegionKind::Polydisc)
        throw std::invalid_argument("rescaled_graph_mass: K must be a polydisc");
    if (static_cast<int>(K.dim()) != 2 * q + 2 * codim)
        throw std::invalid_argument("rescaled_graph_mass: K has the wrong dimension");
    KSplit s;
    int at = 0;
    auto take = [&](CVec& c, std::vector<double>& r, int n) {
        for (int j = 0; j < n; ++j) {
            c.push_back(K.center[at]);
            r.push_back(K.radii[at]);
            ++at;
        }
    };
    take(s.cz, s.rz, q);
    take(s.cw, s.rw, q);
    take(s.cf, s.rf, codim);
    take(s.cg, s.rg, codim);
    return s;
}

}  // namespace detail

inline double rescaled_graph_mass(const ProductFamily& P, const CVec& alpha1, const CVec& alpha2,
                                  double lambda, const Region& K, const RescaledMassOptions& opt = {}) {
    if (lambda < 1.0) throw std::invalid_argument("rescaled_graph_mass: lambda must be >= 1");
    const int q = P.q(), codim = P.codim();
    const auto S = detail::split_region(K, q, codim);

    const double mass_scale = [&] {
        double fac = 1.0;
        for (int k = 2; k <= 2 * q; ++k) fac *= k;
        return fac * std::pow(2.0, 2 * q);
    }();

    // domain clip: the graph lives over ||z'|| < rho, ||w'|| < lambda rho;
    // the K blocks over the graph coordinates must be centered so the clip
    // stays a polydisc
    for (int j = 0; j < q; ++j)
        if (std::abs(S.cz[j]) > 1e-15 || std::abs(S.cw[j]) > 1e-15)
            throw std::invalid_argument("rescaled_graph_mass: K domain blocks must be centered at 0");

    const CVec b = alpha1 + alpha2;

    // fast path: constant family (graph components constant)
    if (P.base.structure == ZStructure::Constant && q == 1) {
        const CVec fv = P.base.eval(alpha1, CVec(q, Complex(0, 0)));
        const CVec gv0 = P.base.eval(b, CVec(q, Complex(0, 0)));
        bool hit = true;
        for (int j = 0; j < codim; ++j) {
            if (std::abs(fv[j] - S.cf[j]) > S.rf[j]) hit = false;
            const Complex wpp = lambda * (gv0[j] - fv[j]);
            if (std::abs(wpp - S.cg[j]) > S.rg[j]) hit = false;
        }
        if (!hit) return 0.0;
        const double rz_eff = std::min(P.rho, S.rz[0]);
        const double rw_eff = std::min(lambda * P.rho, S.rw[0]);
        return mass_scale * (kPi * rz_eff * rz_eff) * (kPi * rw_eff * rw_eff);
    }

    // fast path: affine family in one leaf dimension and codimension one,
    // with the w'-section area in closed form (two-disc intersection)
    if (P.base.structure == ZStructure::Affine && q == 1 && codim == 1) {
        const AffineCoeffs ca = affine_coeffs(P.base, alpha1);
        const AffineCoeffs cb = affine_coeffs(P.base, b);
        const Complex A1 = ca.c0[0], B1 = ca.cz[0][0];
        const Complex Ab = cb.c0[0], Bb = cb.cz[0][0];
        // w''(z', w') = lambda g(z', w'/lambda) = lambda[(Ab-A1) + (Bb-B1) z'] + Bb w'
        const Complex U0 = lambda * (Ab - A1);
        const Complex Uz = lambda * (Bb - B1);

        const double rz_eff = std::min(P.rho, S.rz[0]);
        const double rw_eff = std::min(lambda * P.rho, S.rw[0]);

        // constant Jacobian of the graph map (z', w') -> (z'', w'')
        const double det = [&] {
            // J = [[B1, 0], [Uz, Bb]]; det(I + J^H J) for the 2x2 case
            const double a = 1.0 + std::norm(B1) + std::norm(Uz);
            const Complex c = Uz * std::conj(Bb);
            const double d = 1.0 + std::norm(Bb);
            return a * d - std::norm(c);
        }();

        auto lens = [&](Complex zp) -> double {
            // f-gate on z'
            if (std::abs(A1 + B1 * zp - S.cf[0]) > S.rf[0]) return 0.0;
            const Complex U = U0 + Uz * zp - S.cg[0];
            if (std::abs(Bb) < 1e-15)
                return std::abs(U) <= S.rg[0] ? kPi * rw_eff * rw_eff : 0.0;
            // |U + Bb w'| <= rg  <=>  |w' - t| <= rg/|Bb|
            const Complex t = -U / Bb;
            return disc_intersection_area(std::abs(t), rw_eff, S.rg[0] / std::abs(Bb));
        };
        std::vector<std::function<double(Complex)>> edges;
        if (std::abs(B1) > 1e-15)
            edges.emplace_back([&](Complex zp) { return S.rf[0] - std::abs(A1 + B1 * zp - S.cf[0]); });
        const double vol4 =
            integrate_disc_split<double>(Complex(0, 0), rz_eff, lens, edges, opt.order, 2 * opt.order);
        return mass_scale * det * vol4;
    }

    // generic path for q = 1: nested split quadrature. The z''-cut depends on
    // z' alone (f reads only alpha1), so both the outer and the inner
    // integrals can split at their own region boundaries.
    if (q == 1) {
        const double rz_eff = std::min(P.rho, S.rz[0]);
        const double rw_eff = std::min(lambda * P.rho, S.rw[0]);
        const double jac_radius = 0.2 * std::max(0.05, P.base.holomorphy_radius - 2.0 * P.rho);

        HoloMap graph = [&](const CVec& zw) {
            const CVec zp{zw[0]};
            const CVec sum{zw[0] + zw[1] / lambda};
            CVec fv = P.base.eval(alpha1, zp);
            CVec gv = P.base.eval(b, sum) - fv;
            CVec out(2 * codim);
            for (int j = 0; j < codim; ++j) {
                out[j] = fv[j];
                out[codim + j] = lambda * gv[j];
            }
            return out;
        };
        auto f_edge = [&](Complex zp) {
            const CVec fv = P.base.eval(alpha1, {zp});
            double e = 1e300;
            for (int j = 0; j < codim; ++j) e = std::min(e, S.rf[j] - std::abs(fv[j] - S.cf[j]));
            return e;
        };
        auto outer = [&](Complex zp) -> double {
            if (f_edge(zp) < 0.0) return 0.0;
            auto g_edge = [&](Complex wp) {
                const CVec v = graph({zp, wp});
                double e = 1e300;
                for (int j = 0; j < codim; ++j)
                    e = std::min(e, S.rg[j] - std::abs(v[codim + j] - S.cg[j]));
                return e;
            };
            auto inner = [&](Complex wp) -> double {
                if (g_edge(wp) < 0.0) return 0.0;
                const auto jet = holo_jacobian(graph, {zp, wp}, jac_radius, opt.jacobian_nodes);
                return detail::induced_density(jet.jacobian, 2);
            };
            return integrate_disc_split<double>(Complex(0, 0), rw_eff, inner, {g_edge},
                                                opt.generic_order, 2 * opt.generic_order);
        };
        const double vol4 = integrate_disc_split<double>(
            Complex(0, 0), rz_eff, outer, {[&](Complex zp) { return f_edge(zp); }},
            opt.generic_order, 2 * opt.generic_order);
        return mass_scale * vol4;
    }

    // higher leaf dimensions: full graph quadrature with region restriction
    Region domain = Region::polydisc(CVec(2 * q, Complex(0, 0)), [&] {
        std::vector<double> r(2 * q);
        for (int j = 0; j < q; ++j) {
            r[j] = std::min(P.rho, S.rz[j]);
            r[q + j] = std::min(lambda * P.rho, S.rw[j]);
        }
        return r;
    }());
    HoloMap graph = [&](const CVec& zw) {
        CVec zp(zw.begin(), zw.begin() + q);
        CVec wp(zw.begin() + q, zw.end());
        CVec wl(q);
        for (int j = 0; j < q; ++j) wl[j] = wp[j] / lambda;
        CVec fv = P.base.eval(alpha1, zp);
        CVec gv = P.base.eval(b, zp + wl) - fv;
        CVec out(2 * codim);
        for (int j = 0; j < codim; ++j) {
            out[j] = fv[j];
            out[codim + j] = lambda * gv[j];
        }
        return out;
    };
    Region fiber_region = Region::polydisc([&] {
        CVec c = S.cf;
        c.insert(c.end(), S.cg.begin(), S.cg.end());
        return c;
    }(), [&] {
        std::vector<double> r = S.rf;
        r.insert(r.end(), S.rg.begin(), S.rg.end());
        return r;
    }());
    GraphIndicator ind = [&](const CVec&, const CVec& fx) { return fiber_region.contains(fx); };
    auto edge = [&](const CVec&, const CVec& fx) { return fiber_region.edge(fx); };
    GraphQuadOptions gopt;
    gopt.order = opt.generic_order;
    gopt.jacobian_nodes = opt.jacobian_nodes;
    gopt.jacobian_radius = 0.2 * std::max(0.05, P.base.holomorphy_radius - 2.0 * P.rho);
    return mass_scale * graph_volume(graph, domain, ind, gopt, edge);
}

}  // namespace lamlab
