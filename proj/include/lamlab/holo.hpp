#pragma once

#include <functional>
#include <vector>

#include "lamlab/util.hpp"

namespace lamlab {

/// Holomorphic map C^m -> C^N given by an evaluator.
using HoloMap = std::function<CVec(const CVec&)>;

/// Value and complex Jacobian of a holomorphic map at a point.
struct HoloJet {
    CVec value;                      // length N
    std::vector<CVec> jacobian;     // N rows of length m: d f_i / d z_j

    [[nodiscard]] double jacobian_frobenius() const {
        double s = 0.0;
        for (const auto& row : jacobian)
            for (const auto& e : row) s += std::norm(e);
        return std::sqrt(s);
    }
};

/// Jacobian by trapezoid quadrature of Cauchy's integral on a circle of the
/// given radius around the point; the value is a direct evaluation. Exact for
/// polynomials of degree below the node count.
inline HoloJet holo_jacobian(const HoloMap& f, const CVec& point, double circle_radius, int nodes) {
    if (nodes < 8) throw std::invalid_argument("holo_jacobian: need at least 8 circle nodes");
    if (circle_radius <= 0.0) throw std::invalid_argument("holo_jacobian: radius must be positive");

    HoloJet jet;
    jet.value = f(point);
    const std::size_t n_out = jet.value.size();
    const std::size_t m = point.size();
    jet.jacobian.assign(n_out, CVec(m, 0.0));

    CVec probe = point;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<CVec> terms(nodes, CVec(n_out, 0.0));
        for (int k = 0; k < nodes; ++k) {
            const double th = 2.0 * kPi * k / nodes;
            const Complex rot(std::cos(th), std::sin(th));
            probe[j] = point[j] + circle_radius * rot;
            const CVec fv = f(probe);
            if (fv.size() != n_out) throw std::runtime_error("holo_jacobian: inconsistent output dim");
            const Complex back = std::conj(rot) / (circle_radius * static_cast<double>(nodes));
            for (std::size_t i = 0; i < n_out; ++i) terms[k][i] = fv[i] * back;
        }
        probe[j] = point[j];
        for (std::size_t i = 0; i < n_out; ++i) {
            std::vector<Complex> col(nodes);
            for (int k = 0; k < nodes; ++k) col[k] = terms[k][i];
            jet.jacobian[i][j] = pairwise_sum(std::span<const Complex>(col));
        }
    }
    return jet;
}

}  // namespace lamlab
