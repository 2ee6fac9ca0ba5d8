#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "lamlab/region.hpp"
#include "lamlab/util.hpp"

namespace lamlab {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1,1]
    std::vector<double> w;
};

/// Gauss-Legendre rule of the given order, computed by Newton iteration on
/// the Legendre recurrence and cached.
inline const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.x[i] = -x;
        rule.x[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.w[i] = w;
        rule.w[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

/// Tensor quadrature grid over a polydisc or box in C^m. Weights sum to the
/// Lebesgue volume of the domain.
struct QuadratureGrid {
    std::vector<CVec> nodes;
    std::vector<double> weights;
    int radial_order = 0;
    int angular_order = 0;
    Region domain;

    [[nodiscard]] double integrate(const std::function<double(const CVec&)>& f) const {
        std::vector<double> terms(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = weights[i] * f(nodes[i]);
        return pairwise_sum(terms);
    }

    [[nodiscard]] Complex integrate_c(const std::function<Complex(const CVec&)>& f) const {
        std::vector<Complex> terms(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = weights[i] * f(nodes[i]);
        return pairwise_sum(terms);
    }
};

namespace detail {

struct CoordNodes {
    std::vector<Complex> z;
    std::vector<double> w;
};

/// Nodes for one complex coordinate of a disc |z - c| <= R.
/// Radial Gauss-Legendre in u = (rho/R)^2 times a uniform angular rule, so
/// monomials z^a zbar^b with a+b below the order integrate exactly.
inline CoordNodes disc_coord_nodes(Complex c, double R, int radial, int angular) {
    const GaussRule& gl = gauss_legendre(radial);
    CoordNodes out;
    out.z.reserve(static_cast<std::size_t>(radial) * angular);
    out.w.reserve(out.z.capacity());
    // dA = (R^2/2) du dtheta under rho = R*sqrt(u)
    for (int i = 0; i < radial; ++i) {
        const double u = 0.5 * (gl.x[i] + 1.0);
        const double wu = 0.5 * gl.w[i];
        const double rho = R * std::sqrt(u);
        for (int k = 0; k < angular; ++k) {
            const double th = 2.0 * kPi * k / angular;
            out.z.push_back(c + Complex(rho * std::cos(th), rho * std::sin(th)));
            out.w.push_back(0.5 * R * R * wu * (2.0 * kPi / angular));
        }
    }
    return out;
}

inline CoordNodes square_coord_nodes(Complex c, double r, int order) {
    const GaussRule& gl = gauss_legendre(order);
    CoordNodes out;
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
            out.z.push_back(c + Complex(r * gl.x[i], r * gl.x[j]));
            out.w.push_back(r * r * gl.w[i] * gl.w[j]);
        }
    return out;
}

}  // namespace detail

/// Tensor Gauss grid over a polydisc or box domain. For polydiscs each
/// complex coordinate carries (order radial) x (2*order angular) nodes,
/// exact for polynomial integrands of total degree below the order.
inline QuadratureGrid gauss_grid(int order, const Region& domain) {
    if (order < 2) throw std::invalid_argument("gauss_grid: order must be >= 2");
    domain.validate();
    if (domain.kind == RegionKind::Ball)
        throw std::invalid_argument("gauss_grid: tensor grids need polydisc or box domains");

    const std::size_t m = domain.dim();
    const int angular = 2 * order;
    std::vector<detail::CoordNodes> per_coord(m);
    for (std::size_t j = 0; j < m; ++j) {
        per_coord[j] = domain.kind == RegionKind::Polydisc
                           ? detail::disc_coord_nodes(domain.center[j], domain.radii[j], order, angular)
                           : detail::square_coord_nodes(domain.center[j], domain.radii[j], order);
    }

    QuadratureGrid grid;
    grid.radial_order = order;
    grid.angular_order = angular;
    grid.domain = domain;
    std::size_t total = 1;
    for (const auto& cn : per_coord) total *= cn.z.size();
    grid.nodes.reserve(total);
    grid.weights.reserve(total);

    std::vector<std::size_t> idx(m, 0);
    CVec point(m);
    for (std::size_t flat = 0; flat < total; ++flat) {
        double w = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            point[j] = per_coord[j].z[idx[j]];
            w *= per_coord[j].w[idx[j]];
        }
        grid.nodes.push_back(point);
        grid.weights.push_back(w);
        for (std::size_t j = m; j-- > 0;) {
            if (++idx[j] < per_coord[j].z.size()) break;
            idx[j] = 0;
        }
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Boundary-aware one-coordinate integrators. Region cuts show up as sign
// changes of an edge function along each ray; we locate them by bisection and
// integrate each smooth piece with its own Gauss rule, which keeps masses
// restricted to balls and sublevel sets accurate to quadrature precision.
// ---------------------------------------------------------------------------

namespace detail {

/// Generic scalar used by the split integrators (double or Complex).
template <typename T>
inline void split_points(const std::function<double(double)>& edge, double a, double b,
                         int probes, std::vector<double>& cuts) {
    if (!edge) return;
    double prev_t = a;
    double prev_e = edge(a);
    for (int i = 1; i <= probes; ++i) {
        const double t = a + (b - a) * i / probes;
        const double e = edge(t);
        if ((prev_e < 0.0) != (e < 0.0)) {
            double lo = prev_t, hi = t, elo = prev_e;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double em = edge(mid);
                if ((elo < 0.0) != (em < 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                    elo = em;
                }
                if (hi - lo < 1e-14 * (b - a)) break;
            }
            cuts.push_back(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_e = e;
    }
}

}  // namespace detail

/// Integrate f over [a,b], splitting the interval at sign changes of each
/// edge function. Edge functions must be continuous along the interval.
template <typename T>
T integrate_segment_split(double a, double b, const std::function<T(double)>& f,
                          const std::vector<std::function<double(double)>>& edges, int order) {
    std::vector<double> cuts{a, b};
    const int probes = std::max(2 * order, 16);
    for (const auto& e : edges) detail::split_points<T>(e, a, b, probes, cuts);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double u, double v) { return std::abs(u - v) < 1e-13 * (b - a + 1.0); }),
               cuts.end());

    const GaussRule& gl = gauss_legendre(order);
    std::vector<T> terms;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double lo = cuts[p], hi = cuts[p + 1];
        const double h = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (int i = 0; i < order; ++i) terms.push_back(f(mid + h * gl.x[i]) * (h * gl.w[i]));
    }
    return pairwise_sum(std::span<const T>(terms));
}

/// Integrate f(z) dA over the disc |z - c| <= R with per-ray radial splitting
/// at the zeros of the edge functions (each edge receives the ray point).
template <typename T>
T integrate_disc_split(Complex c, double R, const std::function<T(Complex)>& f,
                       const std::vector<std::function<double(Complex)>>& edges, int radial_order,
                       int angular_order) {
    std::vector<T> ray_terms;
    ray_terms.reserve(angular_order);
    for (int k = 0; k < angular_order; ++k) {
        const double th = 2.0 * kPi * k / angular_order;
        const Complex dir(std::cos(th), std::sin(th));
        std::vector<std::function<double(double)>> ray_edges;
        ray_edges.reserve(edges.size());
        for (const auto& e : edges)
            ray_edges.emplace_back([&, dir](double rho) { return e(c + rho * dir); });
        auto g = [&, dir](double rho) -> T { return f(c + rho * dir) * rho; };
        ray_terms.push_back(integrate_segment_split<T>(0.0, R, g, ray_edges, radial_order) *
                            (2.0 * kPi / angular_order));
    }
    return pairwise_sum(std::span<const T>(ray_terms));
}

}  // namespace lamlab
