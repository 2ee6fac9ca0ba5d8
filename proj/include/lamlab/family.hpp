#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lamlab/expression.hpp"
#include "lamlab/holo.hpp"
#include "lamlab/transversal.hpp"

namespace lamlab {

/// Structure of the z'-dependence, detected from the expression tree and
/// used to pick exact fast paths (constant Jacobians for affine families).
enum class ZStructure { Constant, Affine, Generic };

/// Chart-local family of holomorphic graphs z' |-> h_a(z') indexed by a
/// transversal parameter; the local normal form of a lamination.
struct PlaqueFamily {
    int leaf_dim = 1;  // q
    int codim = 1;     // n - q
    Transversal transversal;
    std::function<CVec(const CVec& a, const CVec& z)> eval;
    double value_bound = 1.0;
    double holomorphy_radius = 1.0;  // radius of holomorphy in each z' coordinate
    ZStructure structure = ZStructure::Generic;
    bool centered = false;  // h_a(0) = a and h_0 == 0
    std::string label;

    [[nodiscard]] CVec operator()(const CVec& a, const CVec& z) const { return eval(a, z); }
};

struct FlowBox {
    PlaqueFamily family;
    double rho = 0.5;  // working radius, <= 1/2
    std::string label;

    void validate() const {
        if (rho <= 0.0 || rho > 0.5) throw std::invalid_argument("flow box: rho must lie in (0, 1/2]");
    }
};

/// h_a(z) = c0 + sum_j cz[j] z_j for families of affine z-structure.
struct AffineCoeffs {
    CVec c0;
    std::vector<CVec> cz;  // one vector per z coordinate
};

inline AffineCoeffs affine_coeffs(const PlaqueFamily& fam, const CVec& a) {
    if (fam.structure == ZStructure::Generic)
        throw std::logic_error("affine_coeffs: family is not affine in z'");
    AffineCoeffs co;
    CVec zero(fam.leaf_dim, Complex(0, 0));
    co.c0 = fam.eval(a, zero);
    co.cz.resize(fam.leaf_dim);
    for (int j = 0; j < fam.leaf_dim; ++j) {
        CVec ej(fam.leaf_dim, Complex(0, 0));
        ej[j] = 1.0;
        CVec v = fam.eval(a, ej);
        co.cz[j] = v - co.c0;
    }
    return co;
}

inline PlaqueFamily family_from_expression(const FamilyExpression& expr, Transversal transversal,
                                           double holomorphy_radius = 4.0, std::string label = {}) {
    if (!expr.valid()) throw std::invalid_argument("family_from_expression: empty expression");
    if (expr.max_a_index() > static_cast<int>(transversal.param_dim()))
        throw std::invalid_argument("family expression references a" +
                                    std::to_string(expr.max_a_index()) +
                                    " beyond the transversal dimension");
    PlaqueFamily fam;
    fam.leaf_dim = std::max(1, expr.max_z_index());
    fam.codim = 1;
    fam.transversal = std::move(transversal);
    fam.holomorphy_radius = holomorphy_radius;
    fam.label = label.empty() ? expr.print() : std::move(label);
    const int deg = expr.z_degree();
    fam.structure = deg == 0 ? ZStructure::Constant
                             : (deg == 1 ? ZStructure::Affine : ZStructure::Generic);
    fam.eval = [expr](const CVec& a, const CVec& z) { return CVec{expr.eval(a, z)}; };

    // centered iff h_a(0) = a on a probe grid (codim-1 expression families
    // can only be centered over one-dimensional transversals)
    bool centered = fam.transversal.param_dim() == 1;
    if (centered) {
        for (const CVec& a : fam.transversal.grid(9)) {
            CVec h0 = fam.eval(a, CVec(fam.leaf_dim, Complex(0, 0)));
            if (std::abs(h0[0] - a[0]) > 1e-12) {
                centered = false;
                break;
            }
        }
    }
    fam.centered = centered;

    double bound = 0.0;
    for (const CVec& a : fam.transversal.grid(16)) {
        for (int i = 0; i < 8; ++i) {
            CVec z(fam.leaf_dim);
            for (int j = 0; j < fam.leaf_dim; ++j)
                z[j] = std::polar(0.999, 2.0 * kPi * (i + 0.37 * j) / 8.0);
            bound = std::max(bound, sup_norm(fam.eval(a, z)));
        }
    }
    fam.value_bound = bound;
    return fam;
}

/// Jet of a |-> h_a at a point of the plaque, with the declared holomorphy
/// domain enforced.
inline HoloJet family_jet(const PlaqueFamily& fam, const CVec& a, const CVec& z,
                          double circle_radius = 0.0, int nodes = 16) {
    double margin = fam.holomorphy_radius - sup_norm(z);
    if (margin <= 0.0) throw std::domain_error("family_jet: point outside the holomorphy domain");
    double r = circle_radius > 0.0 ? circle_radius : 0.4 * margin;
    if (r > margin)
        throw std::domain_error("family_jet: circle radius exceeds the declared holomorphy domain");
    HoloMap f = [&](const CVec& zz) { return fam.eval(a, zz); };
    return holo_jacobian(f, z, r, nodes);
}

/// Residual of the Cauchy reconstruction of h_a at off-center probe points.
/// Zero (to quadrature precision) for holomorphic families; order of the
/// circle radius when anti-holomorphic terms are present.
inline double verify_holomorphy(const PlaqueFamily& fam, const CVec& a, int circle_nodes = 48) {
    const double rho = 0.7 * std::min(1.0, fam.holomorphy_radius);
    double worst = 0.0;
    std::vector<CVec> zs;
    if (fam.leaf_dim == 1) {
        zs.push_back({Complex(0, 0)});
        for (int i = 0; i < 8; ++i) zs.push_back({std::polar(rho * (0.3 + 0.1 * (i % 3)), 0.7 * i)});
    } else {
        CVec z0(fam.leaf_dim, Complex(0, 0));
        zs.push_back(z0);
        for (int i = 0; i < 8; ++i) {
            CVec z(fam.leaf_dim);
            for (int j = 0; j < fam.leaf_dim; ++j) z[j] = std::polar(rho * 0.4, 0.9 * i + 0.31 * j);
            zs.push_back(z);
        }
    }
    for (const CVec& z : zs) {
        for (int j = 0; j < fam.leaf_dim; ++j) {
            const double r = 0.4 * (fam.holomorphy_radius - sup_norm(z));
            for (int probe = 0; probe < 2; ++probe) {
                const Complex p = z[j] + 0.35 * r * std::polar(1.0, probe == 0 ? 0.3 : 2.6);
                CVec zp = z;
                zp[j] = p;
                const CVec direct = fam.eval(a, zp);
                CVec recon(fam.codim, Complex(0, 0));
                std::vector<CVec> terms(circle_nodes, CVec(fam.codim));
                for (int k = 0; k < circle_nodes; ++k) {
                    const Complex zeta = z[j] + r * std::polar(1.0, 2.0 * kPi * k / circle_nodes);
                    CVec zq = z;
                    zq[j] = zeta;
                    const CVec h = fam.eval(a, zq);
                    const Complex w = (zeta - z[j]) / (static_cast<double>(circle_nodes) * (zeta - p));
                    for (int i = 0; i < fam.codim; ++i) terms[k][i] = h[i] * w;
                }
                for (int i = 0; i < fam.codim; ++i) {
                    std::vector<Complex> col(circle_nodes);
                    for (int k = 0; k < circle_nodes; ++k) col[k] = terms[k][i];
                    recon[i] = pairwise_sum(std::span<const Complex>(col));
                }
                worst = std::max(worst, sup_norm(direct - recon));
            }
        }
    }
    return worst;
}

/// Transversal bi-Lipschitz constants estimated over sampled parameter
/// pairs: sup and inf of the max-coordinate discrepancy of h_alpha - h_beta
/// relative to the parameter gap (sup norms on both sides).
struct BiLipEstimate {
    double c_lower = 0.0;
    double c_upper = 0.0;
    int pairs_used = 0;
    bool insufficient = false;  // transversal had no valid pairs
};

inline BiLipEstimate estimate_bilipschitz(const PlaqueFamily& fam, double rho, int sample_pairs,
                                          std::uint64_t seed) {
    if (rho > fam.holomorphy_radius)
        throw std::domain_error("estimate_bilipschitz: rho exceeds the holomorphy radius");
    BiLipEstimate est;
    est.c_lower = 1e300;
    RngStream rng(seed, 101);

    std::vector<CVec> zs;
    if (fam.leaf_dim == 1) {
        zs.push_back({Complex(0, 0)});
        for (int i = 0; i < 12; ++i)
            zs.push_back({std::polar(rho * ((i % 3) + 1) / 3.0, 2.0 * kPi * i / 12.0)});
    } else {
        zs.push_back(CVec(fam.leaf_dim, Complex(0, 0)));
        for (int i = 0; i < 12; ++i) {
            CVec z(fam.leaf_dim);
            for (int j = 0; j < fam.leaf_dim; ++j)
                z[j] = std::polar(rho * ((i + j) % 3 + 1) / 3.0, 0.7 * i + 0.41 * j);
            zs.push_back(z);
        }
    }

    for (int it = 0; it < sample_pairs; ++it) {
        const CVec alpha = fam.transversal.sample(rng);
        const CVec beta = fam.transversal.sample(rng);
        double gap = 0.0;
        for (std::size_t j = 0; j < alpha.size(); ++j) gap = std::max(gap, std::abs(alpha[j] - beta[j]));
        if (gap < 1e-9) continue;  // pair-separation floor
        for (const CVec& z : zs) {
            const CVec diff = fam.eval(alpha, z) - fam.eval(beta, z);
            const double disc = sup_norm(diff);
            est.c_upper = std::max(est.c_upper, disc / gap);
            est.c_lower = std::min(est.c_lower, disc / gap);
        }
        ++est.pairs_used;
    }
    if (est.pairs_used == 0) {
        est.insufficient = true;
        est.c_lower = 0.0;
        est.c_upper = 0.0;
    }
    return est;
}

/// Bound k on ||D(h_b(z'+w') - h_a(z'))|| / ||(a, b-a)|| over sampled
/// parameters and points with ||z'||,||w'|| <= rho; feeds the no-mass box.
inline double derivative_bound(const PlaqueFamily& fam, double rho, int refine = 1) {
    if (rho >= fam.holomorphy_radius)
        throw std::domain_error("derivative_bound: rho must stay below the holomorphy radius");
    const int n_params = 8 * refine;
    const auto params = fam.transversal.grid(n_params);
    const int q = fam.leaf_dim;

    std::vector<CVec> pts;  // z and w probe values per coordinate block
    const int n_ring = 4 * refine;
    if (q == 1) {
        pts.push_back({Complex(0, 0)});
        for (int i = 0; i < n_ring; ++i) pts.push_back({std::polar(rho, 2.0 * kPi * i / n_ring)});
        for (int i = 0; i < n_ring; ++i)
            pts.push_back({std::polar(0.5 * rho, 2.0 * kPi * (i + 0.5) / n_ring)});
    } else {
        pts.push_back(CVec(q, Complex(0, 0)));
        for (int i = 0; i < 2 * n_ring; ++i) {
            CVec z(q);
            for (int j = 0; j < q; ++j) z[j] = std::polar(rho * ((i + j) % 2 ? 1.0 : 0.5), 0.9 * i + 0.37 * j);
            pts.push_back(z);
        }
    }

    const bool affine = fam.structure != ZStructure::Generic;
    double k = 0.0;
    for (const CVec& a : params) {
        for (const CVec& b : params) {
            CVec alpha2 = b - a;
            double na = 0.0;
            for (const auto& c : a) na += std::norm(c);
            for (const auto& c : alpha2) na += std::norm(c);
            na = std::sqrt(na);
            if (na < 1e-12) continue;

            if (affine) {
                const AffineCoeffs ca = affine_coeffs(fam, a);
                const AffineCoeffs cb = affine_coeffs(fam, b);
                // D g = [cz_b - cz_a | cz_b], constant in (z', w')
                double fr = 0.0;
                for (int j = 0; j < q; ++j) {
                    for (int i = 0; i < fam.codim; ++i) {
                        fr += std::norm(cb.cz[j][i] - ca.cz[j][i]);
                        fr += std::norm(cb.cz[j][i]);
                    }
                }
                k = std::max(k, std::sqrt(fr) / na);
                continue;
            }

            HoloMap g = [&](const CVec& zw) {
                CVec z(zw.begin(), zw.begin() + q);
                CVec w(zw.begin() + q, zw.end());
                return fam.eval(b, z + w) - fam.eval(a, z);
            };
            const double margin = fam.holomorphy_radius - 2.0 * rho;
            const double r = std::min(0.25, 0.25 * margin);
            for (const CVec& z : pts) {
                for (const CVec& w : pts) {
                    CVec zw = z;
                    zw.insert(zw.end(), w.begin(), w.end());
                    const auto jet = holo_jacobian(g, zw, r, 16);
                    k = std::max(k, jet.jacobian_frobenius() / na);
                }
            }
        }
    }
    return k;
}

/// Check the four plaque-family invariants on a sampled grid; returns one
/// message per violation.
inline std::vector<std::string> check_plaque_family(const PlaqueFamily& fam, int grid_size = 32) {
    std::vector<std::string> violations;
    const auto params = fam.transversal.grid(grid_size);

    std::vector<CVec> zs;
    if (fam.leaf_dim == 1) {
        zs.push_back({Complex(0, 0)});
        for (int i = 0; i < grid_size; ++i)
            zs.push_back({std::polar(0.999 * ((i % 4) + 1) / 4.0, 2.0 * kPi * i / grid_size)});
    } else {
        zs.push_back(CVec(fam.leaf_dim, Complex(0, 0)));
        for (int i = 0; i < grid_size; ++i) {
            CVec z(fam.leaf_dim);
            for (int j = 0; j < fam.leaf_dim; ++j)
                z[j] = std::polar(0.999 * ((i + j) % 4 + 1) / 4.0, 0.61 * i + 0.29 * j);
            zs.push_back(z);
        }
    }

    double max_value = 0.0;
    for (const auto& a : params)
        for (const auto& z : zs) max_value = std::max(max_value, sup_norm(fam.eval(a, z)));
    if (max_value > 1.0 + 1e-9)
        violations.push_back("values leave the unit polydisc (sup " + format_double(max_value) + ")");

    double holo = 0.0;
    for (std::size_t i = 0; i < params.size(); i += std::max<std::size_t>(1, params.size() / 4))
        holo = std::max(holo, verify_holomorphy(fam, params[i]));
    if (holo > 1e-8)
        violations.push_back("holomorphy residual " + format_double(holo) + " exceeds 1e-8");

    if (fam.centered) {
        CVec zero(fam.leaf_dim, Complex(0, 0));
        double worst = 0.0;
        for (const auto& a : params) {
            const CVec h0 = fam.eval(a, zero);
            double d = 0.0;
            for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(h0[j] - a[j]));
            worst = std::max(worst, d);
        }
        if (worst > 1e-10)
            violations.push_back("centered normal form violated (|h_a(0)-a| up to " +
                                 format_double(worst) + ")");
        CVec zero_param(fam.transversal.param_dim(), Complex(0, 0));
        if (fam.transversal.contains(zero_param)) {
            double h0max = 0.0;
            for (const auto& z : zs) h0max = std::max(h0max, sup_norm(fam.eval(zero_param, z)));
            if (h0max > 1e-10)
                violations.push_back("h_0 is not identically zero (sup " + format_double(h0max) + ")");
        }
    }

    double min_sep = 1e300;
    for (std::size_t i = 0; i < params.size(); ++i)
        for (std::size_t j = i + 1; j < params.size(); ++j) {
            double closest = 1e300;
            for (const auto& z : zs)
                closest = std::min(closest, sup_norm(fam.eval(params[i], z) - fam.eval(params[j], z)));
            min_sep = std::min(min_sep, closest);
        }
    if (params.size() > 1 && min_sep < 1e-10)
        violations.push_back("plaques cross on the sample grid (min separation " +
                             format_double(min_sep) + ")");

    return violations;
}

}  // namespace lamlab
