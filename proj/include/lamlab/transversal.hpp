#pragma once

#include <utility>
#include <vector>

#include "lamlab/rng.hpp"
#include "lamlab/util.hpp"

namespace lamlab {

enum class TransversalKind { RealBox, ComplexPolydisc, CantorSegment };

/// Parameter space of a plaque family. Parameters are always passed around
/// as complex vectors; real transversals use the real axis.
struct Transversal {
    TransversalKind kind = TransversalKind::ComplexPolydisc;

    // RealBox: product of real intervals.
    std::vector<std::pair<double, double>> intervals;

    // ComplexPolydisc: |a_j - c_j| <= r_j.
    CVec centers;
    std::vector<double> radii;

    // CantorSegment: middle-thirds Cantor set in [lo, hi].
    double cantor_lo = 0.0, cantor_hi = 1.0;

    static Transversal real_box(std::vector<std::pair<double, double>> iv) {
        Transversal t;
        t.kind = TransversalKind::RealBox;
        t.intervals = std::move(iv);
        return t;
    }
    static Transversal complex_disc(Complex center, double radius) {
        Transversal t;
        t.kind = TransversalKind::ComplexPolydisc;
        t.centers = {center};
        t.radii = {radius};
        return t;
    }
    static Transversal cantor_segment(double lo, double hi) {
        Transversal t;
        t.kind = TransversalKind::CantorSegment;
        t.cantor_lo = lo;
        t.cantor_hi = hi;
        return t;
    }

    [[nodiscard]] std::size_t param_dim() const {
        switch (kind) {
            case TransversalKind::RealBox:
                return intervals.size();
            case TransversalKind::ComplexPolydisc:
                return centers.size();
            case TransversalKind::CantorSegment:
                return 1;
        }
        return 0;
    }

    [[nodiscard]] bool contains(const CVec& a, double tol = 1e-9) const {
        if (a.size() != param_dim()) return false;
        switch (kind) {
            case TransversalKind::RealBox:
                for (std::size_t j = 0; j < a.size(); ++j) {
                    if (std::abs(a[j].imag()) > tol) return false;
                    if (a[j].real() < intervals[j].first - tol || a[j].real() > intervals[j].second + tol)
                        return false;
                }
                return true;
            case TransversalKind::ComplexPolydisc:
                for (std::size_t j = 0; j < a.size(); ++j)
                    if (std::abs(a[j] - centers[j]) > radii[j] + tol) return false;
                return true;
            case TransversalKind::CantorSegment:
                return std::abs(a[0].imag()) <= tol && a[0].real() >= cantor_lo - tol &&
                       a[0].real() <= cantor_hi + tol;
        }
        return false;
    }

    /// Sup-norm bound on parameters, used when fitting constants that scale
    /// with the parameter size.
    [[nodiscard]] double sup_param_norm() const {
        double m = 0.0;
        switch (kind) {
            case TransversalKind::RealBox:
                for (const auto& [lo, hi] : intervals) m = std::max({m, std::abs(lo), std::abs(hi)});
                return m;
            case TransversalKind::ComplexPolydisc:
                for (std::size_t j = 0; j < centers.size(); ++j)
                    m = std::max(m, std::abs(centers[j]) + radii[j]);
                return m;
            case TransversalKind::CantorSegment:
                return std::max(std::abs(cantor_lo), std::abs(cantor_hi));
        }
        return m;
    }

    /// Uniform-ish draw used by sampling estimators (for the Cantor kind, a
    /// draw from the self-similar measure at depth 32).
    [[nodiscard]] CVec sample(RngStream& rng) const {
        switch (kind) {
            case TransversalKind::RealBox: {
                CVec a(intervals.size());
                for (std::size_t j = 0; j < a.size(); ++j)
                    a[j] = Complex(rng.next_in(intervals[j].first, intervals[j].second), 0.0);
                return a;
            }
            case TransversalKind::ComplexPolydisc: {
                CVec a(centers.size());
                for (std::size_t j = 0; j < a.size(); ++j) a[j] = rng.next_in_disc(centers[j], radii[j]);
                return a;
            }
            case TransversalKind::CantorSegment: {
                double lo = cantor_lo, hi = cantor_hi;
                for (int d = 0; d < 32; ++d) {
                    const double third = (hi - lo) / 3.0;
                    if (rng.next_double() < 0.5) {
                        hi = lo + third;
                    } else {
                        lo = hi - third;
                    }
                }
                return {Complex(0.5 * (lo + hi), 0.0)};
            }
        }
        return {};
    }

    /// Deterministic parameter grid of roughly `count` points for invariant
    /// checks and constant fitting.
    [[nodiscard]] std::vector<CVec> grid(int count) const {
        std::vector<CVec> out;
        switch (kind) {
            case TransversalKind::RealBox: {
                if (intervals.size() != 1) {
                    // tensor grid per interval, count^(1/d) each
                    int per = std::max(2, static_cast<int>(std::round(
                                              std::pow(double(count), 1.0 / intervals.size()))));
                    std::vector<int> idx(intervals.size(), 0);
                    while (true) {
                        CVec a(intervals.size());
                        for (std::size_t j = 0; j < intervals.size(); ++j) {
                            const auto& [lo, hi] = intervals[j];
                            a[j] = Complex(lo + (hi - lo) * (idx[j] + 0.5) / per, 0.0);
                        }
                        out.push_back(a);
                        std::size_t j = 0;
                        for (; j < idx.size(); ++j) {
                            if (++idx[j] < per) break;
                            idx[j] = 0;
                        }
                        if (j == idx.size()) break;
                    }
                    return out;
                }
                const auto& [lo, hi] = intervals[0];
                for (int i = 0; i < count; ++i)
                    out.push_back({Complex(lo + (hi - lo) * (i + 0.5) / count, 0.0)});
                return out;
            }
            case TransversalKind::ComplexPolydisc: {
                // single-disc polar grid; the origin-free radii avoid
                // degenerate coincidences
                const int n_r = std::max(2, static_cast<int>(std::floor(std::sqrt(double(count) / 4.0))));
                const int n_t = std::max(4, count / n_r);
                out.push_back({centers[0]});
                for (int i = 0; i < n_r && static_cast<int>(out.size()) < count; ++i) {
                    const double r = radii[0] * std::sqrt((i + 0.75) / n_r);
                    for (int k = 0; k < n_t && static_cast<int>(out.size()) < count; ++k) {
                        const double th = 2.0 * kPi * (k + 0.25 * (i % 2)) / n_t;
                        out.push_back({centers[0] + Complex(r * std::cos(th), r * std::sin(th))});
                    }
                }
                return out;
            }
            case TransversalKind::CantorSegment: {
                int depth = 1;
                while ((1 << depth) < count && depth < 16) ++depth;
                const int n = 1 << depth;
                for (int s = 0; s < n; ++s) {
                    double lo = cantor_lo, hi = cantor_hi;
                    for (int d = depth - 1; d >= 0; --d) {
                        const double third = (hi - lo) / 3.0;
                        if (((s >> d) & 1) == 0) {
                            hi = lo + third;
                        } else {
                            lo = hi - third;
                        }
                    }
                    out.push_back({Complex(0.5 * (lo + hi), 0.0)});
                }
                return out;
            }
        }
        return out;
    }
};

}  // namespace lamlab
