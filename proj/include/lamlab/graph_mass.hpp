#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "lamlab/holo.hpp"
#include "lamlab/quadrature.hpp"
#include "lamlab/region.hpp"

namespace lamlab {

/// Point predicate on (x, f(x)) pairs restricting a graph integral.
using GraphIndicator = std::function<bool(const CVec& x, const CVec& fx)>;

struct GraphQuadOptions {
    int order = 16;              // radial order; angular is 2*order
    int jacobian_nodes = 16;     // circle nodes for Cauchy derivatives
    double jacobian_radius = 0.05;
    /// Exact Jacobian provider, used instead of circle quadrature when set
    /// (affine families know their derivative in closed form).
    std::function<std::vector<CVec>(const CVec&)> exact_jacobian;
};

namespace detail {

inline double induced_density(const std::vector<CVec>& jac, std::size_t m) {
    // det(I_m + J^H J), the Riemannian area density of a holomorphic graph.
    if (m == 1) {
        double s = 1.0;
        for (const auto& row : jac) s += std::norm(row[0]);
        return s;
    }
    using Mat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;
    Mat J(static_cast<Eigen::Index>(jac.size()), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < jac.size(); ++i)
        for (std::size_t j = 0; j < m; ++j) J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = jac[i][j];
    Mat G = Mat::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) + J.adjoint() * J;
    return G.determinant().real();
}

struct GraphIntegrand {
    const HoloMap& f;
    const GraphQuadOptions& opt;
    std::size_t m;

    double operator()(const CVec& x) const {
        std::vector<CVec> jac;
        if (opt.exact_jacobian) {
            jac = opt.exact_jacobian(x);
        } else {
            jac = holo_jacobian(f, x, opt.jacobian_radius, opt.jacobian_nodes).jacobian;
        }
        return induced_density(jac, m);
    }
};

}  // namespace detail

/// 2m-dimensional Riemannian volume of {(x, f(x)) : x in domain, indicator},
/// computed as the integral of det(I + J^H J) over the admitted part of the
/// domain. The final coordinate is integrated with per-ray splitting at
/// indicator/edge transitions; `edge` (when set) must be continuous and
/// change sign exactly where the indicator flips.
inline double graph_volume(const HoloMap& f, const Region& domain, const GraphIndicator& indicator,
                           const GraphQuadOptions& opt = {},
                           const std::function<double(const CVec& x, const CVec& fx)>& edge = nullptr) {
    domain.validate();
    if (domain.kind == RegionKind::Ball)
        throw std::invalid_argument("graph_volume: domain must be a polydisc or box");
    const std::size_t m = domain.dim();
    detail::GraphIntegrand density{f, opt, m};

    auto point_value = [&](const CVec& x) -> double {
        const CVec fx = f(x);
        if (indicator && !indicator(x, fx)) return 0.0;
        return density(x);
    };
    auto point_edge = [&](const CVec& x) -> double {
        const CVec fx = f(x);
        if (edge) return edge(x, fx);
        if (indicator) return indicator(x, fx) ? 1.0 : -1.0;
        return 1.0;
    };

    const bool need_split = static_cast<bool>(indicator) || static_cast<bool>(edge);

    if (m == 1) {
        if (domain.kind == RegionKind::Box) {
            QuadratureGrid grid = gauss_grid(opt.order, domain);
            return grid.integrate(point_value);
        }
        std::vector<std::function<double(Complex)>> edges;
        if (need_split)
            edges.emplace_back([&](Complex z) { return point_edge(CVec{z}); });
        return integrate_disc_split<double>(
            domain.center[0], domain.radii[0], [&](Complex z) { return point_value(CVec{z}); }, edges,
            opt.order, 2 * opt.order);
    }

    // Tensor nodes over the leading m-1 coordinates, split integration on the
    // last one.
    Region outer = domain;
    outer.center.pop_back();
    outer.radii.pop_back();
    QuadratureGrid og = gauss_grid(opt.order, outer);

    const Complex c_last = domain.center[m - 1];
    const double r_last = domain.radii[m - 1];
    std::vector<double> contributions(og.nodes.size());
    for (std::size_t i = 0; i < og.nodes.size(); ++i) {
        CVec x(m);
        for (std::size_t j = 0; j + 1 < m; ++j) x[j] = og.nodes[i][j];
        auto value1 = [&](Complex zl) {
            CVec p = x;
            p[m - 1] = zl;
            return point_value(p);
        };
        double inner;
        if (domain.kind == RegionKind::Box) {
            // split along the real axis of the last coordinate only; box
            // domains with indicators are used with product regions where the
            // clip is exact, so this path stays simple.
            QuadratureGrid ig = gauss_grid(opt.order, Region::box({c_last}, {r_last}));
            inner = ig.integrate([&](const CVec& zl) { return value1(zl[0]); });
        } else {
            std::vector<std::function<double(Complex)>> edges;
            if (need_split)
                edges.emplace_back([&](Complex zl) {
                    CVec p = x;
                    p[m - 1] = zl;
                    return point_edge(p);
                });
            inner = integrate_disc_split<double>(c_last, r_last, value1, edges, opt.order, 2 * opt.order);
        }
        contributions[i] = og.weights[i] * inner;
    }
    return pairwise_sum(contributions);
}

/// Mass of the integration current over the graph against beta^m with
/// beta = i sum dz_j ^ dzbar_j, restricted to `region`: m! 2^m times the
/// graph volume of the portion whose graph point lies in the region.
inline double trace_mass_graph(const HoloMap& f, const Region& domain, const Region& region, int m,
                               const GraphQuadOptions& opt = {}) {
    if (m != static_cast<int>(domain.dim()))
        throw std::invalid_argument("trace_mass_graph: m must match the domain dimension");
    GraphIndicator ind = [&](const CVec& x, const CVec& fx) {
        CVec p = x;
        p.insert(p.end(), fx.begin(), fx.end());
        return region.contains(p);
    };
    auto edge = [&](const CVec& x, const CVec& fx) {
        CVec p = x;
        p.insert(p.end(), fx.begin(), fx.end());
        return region.edge(p);
    };
    double factorial = 1.0;
    for (int k = 2; k <= m; ++k) factorial *= k;
    const double scale = factorial * std::pow(2.0, m);
    return scale * graph_volume(f, domain, ind, opt, edge);
}

}  // namespace lamlab
