#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lamlab/util.hpp"

namespace lamlab {

enum class RegionKind { Polydisc, Box, Ball };

/// A closed region in C^m used to restrict masses and domains.
/// Polydisc: |z_j - c_j| <= r_j per coordinate.
/// Box: |Re(z_j - c_j)| <= r_j and |Im(z_j - c_j)| <= r_j per coordinate.
/// Ball: sum_j |z_j - c_j|^2 <= r^2 (radii holds the single radius in slot 0;
/// Euclidean balls carry the Lelong-number normalization, so they get their
/// own kind).
struct Region {
    RegionKind kind = RegionKind::Polydisc;
    CVec center;
    std::vector<double> radii;

    static Region polydisc(CVec center, std::vector<double> radii) {
        Region r{RegionKind::Polydisc, std::move(center), std::move(radii)};
        r.validate();
        return r;
    }
    static Region box(CVec center, std::vector<double> radii) {
        Region r{RegionKind::Box, std::move(center), std::move(radii)};
        r.validate();
        return r;
    }
    static Region ball(CVec center, double radius) {
        Region r{RegionKind::Ball, std::move(center), {radius}};
        r.validate();
        return r;
    }

    void validate() const {
        if (center.empty()) throw std::invalid_argument("region: empty center");
        if (kind == RegionKind::Ball) {
            if (radii.size() != 1 || radii[0] <= 0.0)
                throw std::invalid_argument("region: ball needs one positive radius");
            return;
        }
        if (radii.size() != center.size())
            throw std::invalid_argument("region: radii/center size mismatch");
        for (double r : radii)
            if (r <= 0.0) throw std::invalid_argument("region: radii must be positive");
    }

    [[nodiscard]] std::size_t dim() const { return center.size(); }

    [[nodiscard]] bool contains(const CVec& z) const {
        if (z.size() != center.size()) throw std::invalid_argument("region: point dim mismatch");
        switch (kind) {
            case RegionKind::Polydisc:
                for (std::size_t j = 0; j < z.size(); ++j)
                    if (std::abs(z[j] - center[j]) > radii[j]) return false;
                return true;
            case RegionKind::Box:
                for (std::size_t j = 0; j < z.size(); ++j) {
                    const Complex d = z[j] - center[j];
                    if (std::abs(d.real()) > radii[j] || std::abs(d.imag()) > radii[j]) return false;
                }
                return true;
            case RegionKind::Ball: {
                double s = 0.0;
                for (std::size_t j = 0; j < z.size(); ++j) s += std::norm(z[j] - center[j]);
                return s <= radii[0] * radii[0];
            }
        }
        return false;
    }

    /// Signed edge value: >= 0 inside, < 0 outside, 0 on the boundary.
    /// Used by quadrature routines to locate the boundary along rays.
    [[nodiscard]] double edge(const CVec& z) const {
        switch (kind) {
            case RegionKind::Polydisc: {
                double e = 1e300;
                for (std::size_t j = 0; j < z.size(); ++j)
                    e = std::min(e, radii[j] - std::abs(z[j] - center[j]));
                return e;
            }
            case RegionKind::Box: {
                double e = 1e300;
                for (std::size_t j = 0; j < z.size(); ++j) {
                    const Complex d = z[j] - center[j];
                    e = std::min(e, radii[j] - std::abs(d.real()));
                    e = std::min(e, radii[j] - std::abs(d.imag()));
                }
                return e;
            }
            case RegionKind::Ball: {
                double s = 0.0;
                for (std::size_t j = 0; j < z.size(); ++j) s += std::norm(z[j] - center[j]);
                return radii[0] - std::sqrt(s);
            }
        }
        return -1.0;
    }

    [[nodiscard]] double lebesgue_volume() const {
        switch (kind) {
            case RegionKind::Polydisc: {
                double v = 1.0;
                for (double r : radii) v *= kPi * r * r;
                return v;
            }
            case RegionKind::Box: {
                double v = 1.0;
                for (double r : radii) v *= 4.0 * r * r;
                return v;
            }
            case RegionKind::Ball: {
                // vol(B^{2m}(r)) = pi^m r^{2m} / m!
                const auto m = static_cast<double>(center.size());
                double v = 1.0;
                for (std::size_t j = 1; j <= center.size(); ++j)
                    v *= kPi * radii[0] * radii[0] / static_cast<double>(j);
                (void)m;
                return v;
            }
        }
        return 0.0;
    }
};

}  // namespace lamlab
