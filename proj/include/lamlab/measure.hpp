#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lamlab/quadrature.hpp"
#include "lamlab/rng.hpp"
#include "lamlab/transversal.hpp"

namespace lamlab {

struct Atom {
    CVec location;
    double weight = 0.0;
};

struct AtomicComponent {
    std::vector<Atom> atoms;

    [[nodiscard]] double mass() const {
        double s = 0.0;
        for (const auto& a : atoms) s += a.weight;
        return s;
    }
};

struct DensityComponent {
    Transversal domain;  // RealBox or ComplexPolydisc
    std::function<double(const CVec&)> density;
    double density_bound = 1.0;  // sup bound, for rejection sampling
    int quad_order = 16;
    bool uniform = false;  // constant density; enables stratified sampling
    double mass = 1.0;     // integral of the density over the domain
};

struct CantorComponent {
    double lo = 0.0, hi = 1.0;
    int depth = 12;
    double p_left = 0.5, p_right = 0.5;
    double mass = 1.0;

    void validate() const {
        if (depth > 30) throw std::runtime_error("cantor component: depth > 30 exhausts resources");
        if (depth < 1) throw std::invalid_argument("cantor component: depth must be >= 1");
        if (std::abs(p_left + p_right - 1.0) > 1e-12)
            throw std::invalid_argument("cantor component: branch weights must sum to 1");
    }

    /// Midpoint of the depth-`depth` cylinder with the given digit string
    /// (most significant digit first).
    [[nodiscard]] double midpoint(std::uint32_t digits) const {
        double a = lo, b = hi;
        for (int d = depth - 1; d >= 0; --d) {
            const double third = (b - a) / 3.0;
            if (((digits >> d) & 1U) == 0) {
                b = a + third;
            } else {
                a = b - third;
            }
        }
        return 0.5 * (a + b);
    }

    [[nodiscard]] double cylinder_weight(std::uint32_t digits) const {
        double w = 1.0;
        for (int d = 0; d < depth; ++d) w *= ((digits >> d) & 1U) ? p_right : p_left;
        return w;
    }
};

/// Positive measure on a transversal: a mixture of atomic, density-on-box,
/// and self-similar Cantor components. The holonomy-invariant datum of a
/// foliated cycle.
struct TransverseMeasure {
    std::vector<AtomicComponent> atomic;
    std::vector<DensityComponent> densities;
    std::vector<CantorComponent> cantors;

    static TransverseMeasure dirac(CVec location, double weight = 1.0) {
        TransverseMeasure m;
        m.atomic.push_back({{Atom{std::move(location), weight}}});
        m.validate();
        return m;
    }

    static TransverseMeasure atoms(std::vector<Atom> list) {
        TransverseMeasure m;
        m.atomic.push_back({std::move(list)});
        m.validate();
        return m;
    }

    /// Normalized Lebesgue measure on a complex disc.
    static TransverseMeasure lebesgue_disc(Complex center, double radius, int quad_order = 16) {
        TransverseMeasure m;
        DensityComponent d;
        d.domain = Transversal::complex_disc(center, radius);
        const double den = 1.0 / (kPi * radius * radius);
        d.density = [den](const CVec&) { return den; };
        d.density_bound = den;
        d.uniform = true;
        d.quad_order = quad_order;
        d.mass = 1.0;
        m.densities.push_back(std::move(d));
        return m;
    }

    /// Normalized Lebesgue measure on a real segment.
    static TransverseMeasure lebesgue_segment(double lo, double hi, int quad_order = 16) {
        TransverseMeasure m;
        DensityComponent d;
        d.domain = Transversal::real_box({{lo, hi}});
        const double den = 1.0 / (hi - lo);
        d.density = [den](const CVec&) { return den; };
        d.density_bound = den;
        d.uniform = true;
        d.quad_order = quad_order;
        d.mass = 1.0;
        m.densities.push_back(std::move(d));
        return m;
    }

    static TransverseMeasure cantor(double lo, double hi, int depth = 12, double p_left = 0.5,
                                    double p_right = 0.5) {
        TransverseMeasure m;
        CantorComponent c{lo, hi, depth, p_left, p_right, 1.0};
        c.validate();
        m.cantors.push_back(c);
        return m;
    }

    /// w1 * m1 + w2 * m2.
    static TransverseMeasure mixture(double w1, TransverseMeasure m1, double w2, TransverseMeasure m2) {
        m1.scale(w1);
        m2.scale(w2);
        for (auto& c : m2.atomic) m1.atomic.push_back(std::move(c));
        for (auto& c : m2.densities) m1.densities.push_back(std::move(c));
        for (auto& c : m2.cantors) m1.cantors.push_back(std::move(c));
        m1.validate();
        return m1;
    }

    void scale(double w) {
        for (auto& c : atomic)
            for (auto& a : c.atoms) a.weight *= w;
        for (auto& c : densities) {
            c.mass *= w;
            auto base = c.density;
            c.density = [base, w](const CVec& x) { return w * base(x); };
            c.density_bound *= w;
        }
        for (auto& c : cantors) c.mass *= w;
    }

    void validate() const {
        for (const auto& c : atomic) {
            for (const auto& a : c.atoms)
                if (a.weight <= 0.0) throw std::invalid_argument("measure: atom weights must be positive");
            for (std::size_t i = 0; i < c.atoms.size(); ++i)
                for (std::size_t j = i + 1; j < c.atoms.size(); ++j) {
                    double d = 0.0;
                    for (std::size_t k = 0; k < c.atoms[i].location.size(); ++k)
                        d = std::max(d, std::abs(c.atoms[i].location[k] - c.atoms[j].location[k]));
                    if (d < 1e-12) throw std::invalid_argument("measure: atom locations must be distinct");
                }
        }
        for (const auto& c : cantors) c.validate();
        if (total_mass() <= 0.0) throw std::invalid_argument("measure: total mass must be positive");
    }

    [[nodiscard]] double total_mass() const {
        double s = 0.0;
        for (const auto& c : atomic) s += c.mass();
        for (const auto& c : densities) s += c.mass;
        for (const auto& c : cantors) s += c.mass;
        return s;
    }

    [[nodiscard]] bool diffuse() const {
        for (const auto& c : atomic)
            if (!c.atoms.empty()) return false;
        return true;
    }

    [[nodiscard]] std::size_t param_dim() const {
        if (!atomic.empty() && !atomic[0].atoms.empty()) return atomic[0].atoms[0].location.size();
        if (!densities.empty()) return densities[0].domain.param_dim();
        if (!cantors.empty()) return 1;
        return 0;
    }

    /// Integral of f against the measure: weighted sums for atoms, tensor
    /// quadrature for densities, exact cylinder recursion for Cantor parts.
    /// An optional edge function marks parameter loci where f has kinks
    /// (e.g. a plaque touching a region boundary); density quadrature splits
    /// its rays at the sign changes.
    [[nodiscard]] Complex integrate(const std::function<Complex(const CVec&)>& f,
                                    const std::function<double(const CVec&)>& edge = nullptr) const {
        std::vector<Complex> parts;
        for (const auto& c : atomic)
            for (const auto& a : c.atoms) parts.push_back(f(a.location) * a.weight);
        for (const auto& c : densities) {
            if (edge && c.domain.param_dim() == 1) {
                if (c.domain.kind == TransversalKind::ComplexPolydisc) {
                    auto fi = [&](Complex a) { return f({a}) * c.density({a}); };
                    parts.push_back(integrate_disc_split<Complex>(
                        c.domain.centers[0], c.domain.radii[0], fi,
                        {[&](Complex a) { return edge({a}); }}, c.quad_order, 2 * c.quad_order));
                    continue;
                }
                if (c.domain.kind == TransversalKind::RealBox) {
                    const auto& iv = c.domain.intervals[0];
                    auto fi = [&](double x) {
                        return f({Complex(x, 0)}) * c.density({Complex(x, 0)});
                    };
                    parts.push_back(integrate_segment_split<Complex>(
                        iv.first, iv.second, fi,
                        {[&](double x) { return edge({Complex(x, 0)}); }}, c.quad_order));
                    continue;
                }
            }
            parts.push_back(integrate_density(c, f));
        }
        for (const auto& c : cantors) parts.push_back(integrate_cantor(c, f));
        return pairwise_sum(std::span<const Complex>(parts));
    }

    [[nodiscard]] double integrate_real(const std::function<double(const CVec&)>& f) const {
        return integrate([&](const CVec& x) { return Complex(f(x), 0.0); }).real();
    }

    /// Draw a parameter; components are picked proportionally to their mass.
    [[nodiscard]] CVec sample(RngStream& rng) const {
        const double total = total_mass();
        double pick = rng.next_double() * total;
        for (const auto& c : atomic)
            for (const auto& a : c.atoms) {
                pick -= a.weight;
                if (pick <= 0.0) return a.location;
            }
        for (const auto& c : densities) {
            pick -= c.mass;
            if (pick <= 0.0) return sample_density(c, rng);
        }
        for (const auto& c : cantors) {
            pick -= c.mass;
            if (pick <= 0.0) return sample_cantor(c, rng);
        }
        // numerical slack: fall back to the last component
        if (!cantors.empty()) return sample_cantor(cantors.back(), rng);
        if (!densities.empty()) return sample_density(densities.back(), rng);
        return atomic.back().atoms.back().location;
    }

    static CVec sample_density(const DensityComponent& c, RngStream& rng) {
        if (c.uniform) return c.domain.sample(rng);
        for (int it = 0; it < 100000; ++it) {
            CVec x = c.domain.sample(rng);
            if (rng.next_double() * c.density_bound <= c.density(x)) return x;
        }
        throw std::runtime_error("measure: rejection sampling failed (density bound too loose?)");
    }

    static CVec sample_cantor(const CantorComponent& c, RngStream& rng) {
        std::uint32_t digits = 0;
        for (int d = 0; d < c.depth; ++d)
            digits = (digits << 1) | (rng.next_double() < c.p_left ? 0U : 1U);
        return {Complex(c.midpoint(digits), 0.0)};
    }

    static Complex integrate_density(const DensityComponent& c, const std::function<Complex(const CVec&)>& f) {
        if (c.domain.kind == TransversalKind::RealBox) {
            const GaussRule& gl = gauss_legendre(c.quad_order);
            // tensor over intervals
            const auto& iv = c.domain.intervals;
            std::vector<Complex> parts;
            std::vector<int> idx(iv.size(), 0);
            while (true) {
                CVec x(iv.size());
                double w = 1.0;
                for (std::size_t j = 0; j < iv.size(); ++j) {
                    const double h = 0.5 * (iv[j].second - iv[j].first);
                    const double mid = 0.5 * (iv[j].second + iv[j].first);
                    x[j] = Complex(mid + h * gl.x[idx[j]], 0.0);
                    w *= h * gl.w[idx[j]];
                }
                parts.push_back(f(x) * (w * c.density(x)));
                std::size_t j = 0;
                for (; j < iv.size(); ++j) {
                    if (++idx[j] < c.quad_order) break;
                    idx[j] = 0;
                }
                if (j == iv.size()) break;
            }
            return pairwise_sum(std::span<const Complex>(parts));
        }
        // complex polydisc: tensor disc grids
        Region dom = Region::polydisc(c.domain.centers, c.domain.radii);
        QuadratureGrid grid = gauss_grid(c.quad_order, dom);
        return grid.integrate_c([&](const CVec& x) { return f(x) * c.density(x); });
    }

    static Complex integrate_cantor(const CantorComponent& c, const std::function<Complex(const CVec&)>& f) {
        c.validate();
        const std::uint32_t n = 1U << c.depth;
        std::vector<Complex> parts(n);
        for (std::uint32_t s = 0; s < n; ++s)
            parts[s] = f({Complex(c.midpoint(s), 0.0)}) * (c.mass * c.cylinder_weight(s));
        return pairwise_sum(std::span<const Complex>(parts));
    }
};

/// Pushforward under the affine parameter map t -> A t + b (one-dimensional
/// transversals). Real-segment and Cantor components require real A.
inline TransverseMeasure pushforward_affine(const TransverseMeasure& mu, Complex A, Complex b) {
    if (std::abs(A) < 1e-14) throw std::invalid_argument("pushforward: map is not injective");
    TransverseMeasure out;
    for (const auto& c : mu.atomic) {
        AtomicComponent nc;
        for (const auto& atom : c.atoms) {
            if (atom.location.size() != 1)
                throw std::invalid_argument("pushforward: only 1-dimensional transversals supported");
            nc.atoms.push_back({{A * atom.location[0] + b}, atom.weight});
        }
        out.atomic.push_back(std::move(nc));
    }
    for (const auto& c : mu.densities) {
        DensityComponent nc = c;
        if (c.domain.kind == TransversalKind::ComplexPolydisc) {
            nc.domain = Transversal::complex_disc(A * c.domain.centers[0] + b,
                                                  std::abs(A) * c.domain.radii[0]);
            const double jac = std::norm(A);  // area scaling
            auto base = c.density;
            const Complex Ainv = 1.0 / A;
            nc.density = [base, Ainv, b, jac](const CVec& y) {
                return base({Ainv * (y[0] - b)}) / jac;
            };
            nc.density_bound = c.density_bound / jac;
        } else if (c.domain.kind == TransversalKind::RealBox) {
            if (std::abs(A.imag()) > 1e-14 || std::abs(b.imag()) > 1e-14)
                throw std::invalid_argument("pushforward: segment transversals need a real affine map");
            const double Ar = A.real(), br = b.real();
            const auto& iv = c.domain.intervals[0];
            double lo = Ar * iv.first + br, hi = Ar * iv.second + br;
            if (lo > hi) std::swap(lo, hi);
            nc.domain = Transversal::real_box({{lo, hi}});
            auto base = c.density;
            nc.density = [base, Ar, br](const CVec& y) {
                return base({Complex((y[0].real() - br) / Ar, 0.0)}) / std::abs(Ar);
            };
            nc.density_bound = c.density_bound / std::abs(Ar);
        } else {
            throw std::invalid_argument("pushforward: unsupported density domain");
        }
        out.densities.push_back(std::move(nc));
    }
    for (const auto& c : mu.cantors) {
        if (std::abs(A.imag()) > 1e-14 || std::abs(b.imag()) > 1e-14)
            throw std::invalid_argument("pushforward: Cantor components need a real affine map");
        CantorComponent nc = c;
        const double Ar = A.real(), br = b.real();
        nc.lo = Ar * c.lo + br;
        nc.hi = Ar * c.hi + br;
        if (nc.lo > nc.hi) {
            std::swap(nc.lo, nc.hi);
            std::swap(nc.p_left, nc.p_right);
        }
        out.cantors.push_back(nc);
    }
    out.validate();
    return out;
}

}  // namespace lamlab
