#pragma once

#include "lamlab/cycle.hpp"

namespace lamlab {

/// One weighted holomorphic graph of a sampled current inside a bundle
/// chart. `map` is the full embedding C^p -> C^N (identity components
/// included); `base_coord[k]` marks target coordinates lying along the base.
struct GraphListItem {
    double weight = 1.0;
    int p = 1;  // complex dimension of the graph
    HoloMap map;
    std::vector<bool> base_coord;
    double domain_radius = 0.5;
    std::function<std::vector<CVec>(const CVec&)> exact_jacobian;  // optional
};

struct HDimensionResult {
    std::vector<double> masses;  // of S ^ (pi* omega_V)^j ^ beta^(p-j), j = 0..l
    int h_dimension = 0;
    double total_mass = 0.0;
};

namespace detail {

// mixed determinant of 2x2 Hermitian forms: om_A ^ om_B = D(A,B) * 4 dLeb
inline double mixed_det2(const std::array<std::array<Complex, 2>, 2>& A,
                         const std::array<std::array<Complex, 2>, 2>& B) {
    const Complex v = A[0][0] * B[1][1] + B[0][0] * A[1][1] - A[0][1] * B[1][0] - A[1][0] * B[0][1];
    return v.real();
}

}  // namespace detail

/// Largest j with S ^ (pi* omega_V)^j carrying mass above the relative
/// threshold; zero means the current is vertical (fiber-directed).
inline HDimensionResult h_dimension_probe(const std::vector<GraphListItem>& items, int base_dim,
                                          const QuadOptions& opt = {}, double rel_threshold = 1e-8) {
    if (items.empty()) throw std::invalid_argument("h_dimension_probe: zero current is undefined");
    HDimensionResult res;
    res.masses.assign(base_dim + 1, 0.0);

    for (const auto& item : items) {
        if (item.p != 1 && item.p != 2)
            throw std::invalid_argument("h_dimension_probe: graphs of dimension 1 or 2 only");
        Region dom = Region::polydisc(CVec(item.p, Complex(0, 0)),
                                      std::vector<double>(item.p, item.domain_radius));
        QuadratureGrid grid = gauss_grid(opt.order, dom);

        for (int j = 0; j <= base_dim; ++j) {
            if (j > item.p) continue;
            auto integrand = [&](const CVec& u) -> double {
                std::vector<CVec> jac;
                if (item.exact_jacobian) {
                    jac = item.exact_jacobian(u);
                } else {
                    jac = holo_jacobian(item.map, u, 0.05, 16).jacobian;
                }
                if (item.p == 1) {
                    double theta_total = 0.0, theta_base = 0.0;
                    for (std::size_t k = 0; k < jac.size(); ++k) {
                        const double n = std::norm(jac[k][0]);
                        theta_total += n;
                        if (item.base_coord[k]) theta_base += n;
                    }
                    return 2.0 * (j == 0 ? theta_total : theta_base);
                }
                // p == 2: pullback Hermitian forms of the base block and of
                // the full metric form
                std::array<std::array<Complex, 2>, 2> tb{}, tt{};
                for (std::size_t k = 0; k < jac.size(); ++k)
                    for (int u1 = 0; u1 < 2; ++u1)
                        for (int u2 = 0; u2 < 2; ++u2) {
                            const Complex v = jac[k][u1] * std::conj(jac[k][u2]);
                            tt[u1][u2] += v;
                            if (item.base_coord[k]) tb[u1][u2] += v;
                        }
                auto det2 = [](const std::array<std::array<Complex, 2>, 2>& m) {
                    return (m[0][0] * m[1][1] - m[0][1] * m[1][0]).real();
                };
                switch (j) {
                    case 0:
                        return 8.0 * det2(tt);
                    case 1:
                        return 4.0 * detail::mixed_det2(tb, tt);
                    default:
                        return 8.0 * det2(tb);
                }
            };
            res.masses[j] += item.weight * grid.integrate(integrand);
        }
    }

    res.total_mass = res.masses[0];
    if (res.total_mass <= 1e-14)
        throw std::invalid_argument("h_dimension_probe: zero current is undefined");
    res.h_dimension = 0;
    for (int j = base_dim; j >= 1; --j)
        if (res.masses[j] > rel_threshold * res.total_mass) {
            res.h_dimension = j;
            break;
        }
    return res;
}

/// Snapshot of (A_lambda)_* T for the dilation transverse to the disc
/// V = {z = 0}, listed in the normal-bundle frame over V: the base
/// coordinate runs along V (the w direction) and the plaques become graphs
/// over the fiber coordinate. Flat pencils give exactly vertical items.
inline std::vector<GraphListItem> transversal_tangent_snapshot(const FoliatedCycleLocal& T,
                                                               double lambda, int n_items,
                                                               double chart_radius = 0.5) {
    const PlaqueFamily& fam = T.box.family;
    if (fam.leaf_dim != 1 || fam.codim != 1)
        throw std::invalid_argument("transversal_tangent_snapshot: n = 2 charts only");

    // discretize the transverse measure into weighted parameters
    std::vector<std::pair<Complex, double>> weights;
    for (const auto& c : T.mu.atomic)
        for (const auto& a : c.atoms) weights.emplace_back(a.location[0], a.weight);
    for (const auto& c : T.mu.densities) {
        if (c.domain.kind == TransversalKind::ComplexPolydisc) {
            auto nodes = detail::disc_coord_nodes(c.domain.centers[0], c.domain.radii[0],
                                                  std::max(2, n_items / 8), 8);
            for (std::size_t i = 0; i < nodes.z.size(); ++i)
                weights.emplace_back(nodes.z[i], nodes.w[i] * c.density({nodes.z[i]}));
        } else {
            const GaussRule& gl = gauss_legendre(std::max(2, n_items));
            const auto& iv = c.domain.intervals[0];
            for (std::size_t i = 0; i < gl.x.size(); ++i) {
                const double h = 0.5 * (iv.second - iv.first);
                const double x = 0.5 * (iv.second + iv.first) + h * gl.x[i];
                weights.emplace_back(Complex(x, 0.0), h * gl.w[i] * c.density({Complex(x, 0.0)}));
            }
        }
    }
    for (const auto& c : T.mu.cantors) {
        const int depth = std::min(c.depth, 8);
        CantorComponent shallow = c;
        shallow.depth = depth;
        for (std::uint32_t s = 0; s < (1U << depth); ++s)
            weights.emplace_back(Complex(shallow.midpoint(s), 0.0),
                                 c.mass * shallow.cylinder_weight(s));
    }

    std::vector<GraphListItem> items;
    for (const auto& [a, w] : weights) {
        GraphListItem item;
        item.weight = w;
        item.p = 1;
        item.domain_radius = chart_radius;
        // pushed plaque {(lambda z, h_a(z))} as the graph zeta -> h_a(zeta/lambda)
        // over the fiber coordinate zeta
        const CVec av{a};
        auto eval = fam.eval;
        item.map = [eval, av, lambda](const CVec& zeta) {
            CVec out{zeta[0], Complex(0, 0)};
            out[1] = eval(av, {zeta[0] / lambda})[0];
            return out;
        };
        item.base_coord = {false, true};  // (fiber z, base w)
        if (fam.structure != ZStructure::Generic) {
            const Complex slope = fam.structure == ZStructure::Constant
                                      ? Complex(0, 0)
                                      : affine_coeffs(fam, av).cz[0][0] / lambda;
            item.exact_jacobian = [slope](const CVec&) {
                return std::vector<CVec>{{Complex(1, 0)}, {slope}};
            };
        }
        items.push_back(std::move(item));
    }
    return items;
}

}  // namespace lamlab
