#pragma once

#include <optional>

#include "lamlab/family.hpp"
#include "lamlab/forms.hpp"
#include "lamlab/graph_mass.hpp"
#include "lamlab/measure.hpp"

namespace lamlab {

/// Chart-local foliated cycle: a plaque family in a flow box paired with a
/// transverse measure supported on its transversal.
struct FoliatedCycleLocal {
    FlowBox box;
    TransverseMeasure mu;

    [[nodiscard]] bool diffuse() const { return mu.diffuse(); }

    void validate() const {
        box.validate();
        mu.validate();
        const auto& tr = box.family.transversal;
        for (const auto& c : mu.atomic)
            for (const auto& a : c.atoms)
                if (!tr.contains(a.location))
                    throw std::invalid_argument("cycle: atom outside the transversal");
        for (const auto& c : mu.densities)
            for (const auto& x : c.domain.grid(8))
                if (!tr.contains(x))
                    throw std::invalid_argument("cycle: density support outside the transversal");
        for (const auto& c : mu.cantors)
            if (!tr.contains({Complex(c.lo, 0)}) || !tr.contains({Complex(c.hi, 0)}))
                throw std::invalid_argument("cycle: Cantor support outside the transversal");
    }
};

struct QuadOptions {
    int order = 16;
};

namespace detail {

/// z' derivative of h_a for the n=2, q=1 chart.
inline Complex plaque_slope(const PlaqueFamily& fam, const CVec& a, Complex z) {
    if (fam.structure == ZStructure::Constant) return {};
    if (fam.structure == ZStructure::Affine) return affine_coeffs(fam, a).cz[0][0];
    return family_jet(fam, a, {z}).jacobian[0][0];
}

}  // namespace detail

/// <T, alpha> for a (1,1) test form supported inside the flow box. The inner
/// plaque integral is the pullback under z' -> (z', h_a(z')); the outer
/// integral runs over the transverse measure.
inline Complex pair_cycle(const FoliatedCycleLocal& T, const TestForm11& alpha,
                          const QuadOptions& opt = {}) {
    const PlaqueFamily& fam = T.box.family;
    if (fam.leaf_dim != 1 || fam.codim != 1)
        throw std::logic_error("pair: implemented for the n=2, q=1 chart");
    if (alpha.support_radius > 1.0 + 1e-12)
        throw std::invalid_argument("pair: form support leaks outside the flow box");

    auto per_plaque = [&](const CVec& a) -> Complex {
        auto integrand = [&](Complex z) -> Complex {
            const Complex h = fam.eval(a, {z})[0];
            const Complex hp = detail::plaque_slope(fam, a, z);
            const CVec x{z, h};
            const auto m = alpha.coeff(x);
            // pullback coefficients along (1, h'(z'))
            const Complex c[2] = {Complex(1, 0), hp};
            Complex s = 0.0;
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) s += m[j][k] * c[j] * std::conj(c[k]);
            return s * Complex(0, -2.0);  // dz ^ dzbar = -2i dA
        };
        std::vector<std::function<double(Complex)>> edges;
        if (alpha.support_edge)
            edges.emplace_back([&](Complex z) {
                const Complex h = fam.eval(a, {z})[0];
                return alpha.support_edge(CVec{z, h});
            });
        const double dom_r = std::min(1.0, alpha.support_radius + 1e-9);
        return integrate_disc_split<Complex>(Complex(0, 0), dom_r, integrand, edges, opt.order,
                                             2 * opt.order);
    };
    return T.mu.integrate(per_plaque);
}

/// Mass of the trace measure T ^ beta^q over a region.
inline double trace_mass(const FoliatedCycleLocal& T, const Region& region,
                         const QuadOptions& opt = {}) {
    const PlaqueFamily& fam = T.box.family;
    GraphQuadOptions gopt;
    gopt.order = opt.order;
    gopt.jacobian_radius = 0.25 * std::max(0.1, fam.holomorphy_radius - 1.0);
    auto per_plaque = [&](const CVec& a) -> Complex {
        HoloMap h = [&](const CVec& z) { return fam.eval(a, z); };
        GraphQuadOptions o = gopt;
        if (fam.structure != ZStructure::Generic) {
            o.exact_jacobian = [&fam, a](const CVec&) {
                std::vector<CVec> jac(fam.codim, CVec(fam.leaf_dim, Complex(0, 0)));
                if (fam.structure == ZStructure::Affine) {
                    const auto co = affine_coeffs(fam, a);
                    for (int i = 0; i < fam.codim; ++i)
                        for (int j = 0; j < fam.leaf_dim; ++j) jac[i][j] = co.cz[j][i];
                }
                return jac;
            };
        }
        Region domain = Region::polydisc(CVec(fam.leaf_dim, Complex(0, 0)),
                                         std::vector<double>(fam.leaf_dim, 1.0));
        return {trace_mass_graph(h, domain, region, fam.leaf_dim, o), 0.0};
    };
    // the per-plaque mass has a kink where the plaque touches the region
    // boundary; mark it for the transverse quadrature via the region edge of
    // the nearest sampled graph point
    std::vector<CVec> zgrid;
    if (fam.leaf_dim == 1) {
        zgrid.push_back({Complex(0, 0)});
        for (int i = 0; i < 16; ++i)
            zgrid.push_back({std::polar(0.98 * ((i % 4) + 1) / 4.0, 2.0 * kPi * i / 16.0)});
    } else {
        zgrid.push_back(CVec(fam.leaf_dim, Complex(0, 0)));
        for (int i = 0; i < 16; ++i) {
            CVec z(fam.leaf_dim);
            for (int j = 0; j < fam.leaf_dim; ++j)
                z[j] = std::polar(0.98 * ((i + j) % 4 + 1) / 4.0, 0.61 * i + 0.37 * j);
            zgrid.push_back(z);
        }
    }
    auto touch_edge = [&](const CVec& a) {
        double e = -1e300;
        for (const auto& z : zgrid) {
            CVec p = z;
            const CVec h = fam.eval(a, z);
            p.insert(p.end(), h.begin(), h.end());
            e = std::max(e, region.edge(p));
        }
        return e;
    };
    return T.mu.integrate(per_plaque, touch_edge).real();
}

/// |<T, d(gamma)>| against the analytically coded derivative: a numerical
/// closedness certificate (the exact value is zero by Stokes).
inline double stokes_residual(const FoliatedCycleLocal& T, const TestForm1& gamma,
                              const QuadOptions& opt = {}) {
    return std::abs(pair_cycle(T, gamma.d11, opt));
}

/// Split off the atomic part: each atom is a compact-leaf contribution.
struct AtomSplit {
    std::optional<FoliatedCycleLocal> diffuse;
    double diffuse_mass = 0.0;
    std::vector<Atom> atoms;
};

inline AtomSplit atom_split(const FoliatedCycleLocal& T) {
    AtomSplit out;
    for (const auto& c : T.mu.atomic)
        for (const auto& a : c.atoms) out.atoms.push_back(a);
    TransverseMeasure rest;
    rest.densities = T.mu.densities;
    rest.cantors = T.mu.cantors;
    out.diffuse_mass = rest.total_mass();
    if (out.diffuse_mass > 0.0) {
        FoliatedCycleLocal d{T.box, std::move(rest)};
        out.diffuse = std::move(d);
    }
    return out;
}

/// Parameter relabeling gamma with its claimed measure pushforward.
struct Relabeling {
    std::function<CVec(const CVec&)> forward;
    std::function<CVec(const CVec&)> inverse;
    TransverseMeasure pushed;
};

/// Centered reindexing of a raw family by its center value a := f_t(0),
/// together with the measure pushforward. Diffuse measures need an affine
/// center map (the pushforward stays in closed form); atomic measures accept
/// any injective center map.
struct CenteredCycleData {
    PlaqueFamily family;
    TransverseMeasure measure;
};

inline CenteredCycleData center_family(const PlaqueFamily& raw, const TransverseMeasure& mu) {
    if (raw.transversal.param_dim() != 1)
        throw std::invalid_argument("center_family: one-dimensional transversals only");
    const auto params = raw.transversal.grid(48);
    CVec zero(raw.leaf_dim, Complex(0, 0));

    std::vector<Complex> ts, cs;
    for (const auto& t : params) {
        ts.push_back(t[0]);
        cs.push_back(raw.eval(t, zero)[0]);
    }
    for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t j = i + 1; j < cs.size(); ++j)
            if (std::abs(cs[i] - cs[j]) < 1e-10)
                throw std::invalid_argument(
                    "center_family: degenerate transversal (two parameters share a center)");

    bool already = true;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (std::abs(cs[i] - ts[i]) > 1e-12) {
            already = false;
            break;
        }
    if (already) return {raw, mu};

    // least-squares complex-affine fit c(t) = A t + B
    Complex tbar = 0.0, cbar = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        tbar += ts[i];
        cbar += cs[i];
    }
    tbar /= static_cast<double>(ts.size());
    cbar /= static_cast<double>(ts.size());
    Complex num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        num += (cs[i] - cbar) * std::conj(ts[i] - tbar);
        den += std::norm(ts[i] - tbar);
    }
    const Complex A = num / den;
    const Complex B = cbar - A * tbar;
    double resid = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) resid = std::max(resid, std::abs(A * ts[i] + B - cs[i]));

    if (resid > 1e-9) {
        if (!mu.densities.empty() || !mu.cantors.empty())
            throw std::invalid_argument(
                "center_family: non-affine center map needs an atomic measure");
        // atomic lookup reindexing
        PlaqueFamily fam = raw;
        std::vector<std::pair<Complex, Complex>> table;  // center -> original parameter
        TransverseMeasure pushed = mu;
        for (auto& comp : pushed.atomic)
            for (auto& atom : comp.atoms) {
                const Complex t = atom.location[0];
                const Complex c = raw.eval({t}, zero)[0];
                table.emplace_back(c, t);
                atom.location[0] = c;
            }
        auto base = raw.eval;
        fam.eval = [base, table](const CVec& a, const CVec& z) {
            for (const auto& [c, t] : table)
                if (std::abs(a[0] - c) < 1e-9) return base({t}, z);
            throw std::domain_error("centered family: parameter is not a listed center");
        };
        double rmax = 0.0;
        for (const auto& [c, t] : table) rmax = std::max(rmax, std::abs(c));
        fam.transversal = Transversal::complex_disc(Complex(0, 0), std::max(1.0, 1.1 * rmax));
        fam.centered = true;
        fam.label = raw.label + " (centered)";
        pushed.validate();
        return {std::move(fam), std::move(pushed)};
    }

    const bool real_kind = raw.transversal.kind != TransversalKind::ComplexPolydisc;
    if (real_kind && (std::abs(A.imag()) > 1e-12 || std::abs(B.imag()) > 1e-12))
        throw std::invalid_argument(
            "center_family: segment transversals need a real affine center map");

    PlaqueFamily fam = raw;
    auto base = raw.eval;
    const Complex Ainv = 1.0 / A;
    if (real_kind) {
        fam.eval = [base, Ainv, B](const CVec& a, const CVec& z) {
            return base({Complex(((a[0] - B) * Ainv).real(), 0.0)}, z);
        };
    } else {
        fam.eval = [base, Ainv, B](const CVec& a, const CVec& z) { return base({(a[0] - B) * Ainv}, z); };
    }
    switch (raw.transversal.kind) {
        case TransversalKind::ComplexPolydisc:
            fam.transversal = Transversal::complex_disc(
                A * raw.transversal.centers[0] + B, std::abs(A) * raw.transversal.radii[0]);
            break;
        case TransversalKind::RealBox: {
            double lo = (A * raw.transversal.intervals[0].first + B).real();
            double hi = (A * raw.transversal.intervals[0].second + B).real();
            if (lo > hi) std::swap(lo, hi);
            fam.transversal = Transversal::real_box({{lo, hi}});
            break;
        }
        case TransversalKind::CantorSegment: {
            double lo = (A * raw.transversal.cantor_lo + B).real();
            double hi = (A * raw.transversal.cantor_hi + B).real();
            if (lo > hi) std::swap(lo, hi);
            fam.transversal = Transversal::cantor_segment(lo, hi);
            break;
        }
    }
    fam.centered = true;
    fam.label = raw.label + " (centered)";
    return {std::move(fam), pushforward_affine(mu, A, B)};
}

/// Invariance of the pairing under a transversal relabeling with its pushed
/// measure: max normalized discrepancy over a battery of test forms.
inline double holonomy_check(const FoliatedCycleLocal& T, const Relabeling& g, int battery_size = 20,
                             const QuadOptions& opt = {}) {
    // injectivity probe
    const auto params = T.box.family.transversal.grid(24);
    for (std::size_t i = 0; i < params.size(); ++i)
        for (std::size_t j = i + 1; j < params.size(); ++j) {
            const CVec gi = g.forward(params[i]);
            const CVec gj = g.forward(params[j]);
            double din = 0.0, dout = 0.0;
            for (std::size_t k = 0; k < gi.size(); ++k) {
                din = std::max(din, std::abs(params[i][k] - params[j][k]));
                dout = std::max(dout, std::abs(gi[k] - gj[k]));
            }
            if (din > 1e-9 && dout < 1e-12)
                throw std::invalid_argument("holonomy_check: relabeling is not injective");
        }

    // relabeled presentation: plaques indexed by s = gamma(t), then recentered
    PlaqueFamily relabeled = T.box.family;
    auto base = T.box.family.eval;
    auto inv = g.inverse;
    relabeled.eval = [base, inv](const CVec& s, const CVec& z) { return base(inv(s), z); };
    relabeled.centered = false;
    switch (T.box.family.transversal.kind) {
        case TransversalKind::ComplexPolydisc: {
            const Complex c0 = g.forward({T.box.family.transversal.centers[0]})[0];
            double r = 0.0;
            for (const auto& p : params) r = std::max(r, std::abs(g.forward(p)[0] - c0));
            relabeled.transversal = Transversal::complex_disc(c0, 1.25 * r + 1e-9);
            break;
        }
        case TransversalKind::RealBox: {
            double lo = 1e300, hi = -1e300;
            for (const auto& p : params) {
                const double v = g.forward(p)[0].real();
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            relabeled.transversal = Transversal::real_box({{lo - 1e-9, hi + 1e-9}});
            break;
        }
        case TransversalKind::CantorSegment: {
            const double a = g.forward({Complex(T.box.family.transversal.cantor_lo, 0)})[0].real();
            const double b = g.forward({Complex(T.box.family.transversal.cantor_hi, 0)})[0].real();
            relabeled.transversal = Transversal::cantor_segment(std::min(a, b), std::max(a, b));
            break;
        }
    }

    CenteredCycleData centered = center_family(relabeled, g.pushed);
    FoliatedCycleLocal T2{FlowBox{centered.family, T.box.rho, T.box.label}, centered.measure};

    const auto battery = forms::test_battery(battery_size, 0.9);
    double worst = 0.0;
    for (const auto& f : battery) {
        const Complex before = pair_cycle(T, f, opt);
        const Complex after = pair_cycle(T2, f, opt);
        worst = std::max(worst, std::abs(before - after) / (1.0 + std::abs(before)));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Product measure in (alpha1, alpha2) = (a, b - a) coordinates.
// ---------------------------------------------------------------------------

struct DiagonalMassResult {
    double value = 0.0;
    double standard_error = 0.0;  // zero for the exact paths
    bool exact = false;
};

/// mu (x) mu pushed to the coordinates (alpha1, alpha2) = (a, b - a).
struct ProductMeasure {
    TransverseMeasure mu;

    /// One draw of (alpha1, alpha2): a and b independent from mu.
    [[nodiscard]] std::pair<CVec, CVec> sample(RngStream& rng) const {
        CVec a = mu.sample(rng);
        CVec b = mu.sample(rng);
        return {a, b - a};
    }

    [[nodiscard]] bool purely_atomic() const {
        return mu.densities.empty() && mu.cantors.empty();
    }
    [[nodiscard]] bool purely_cantor() const {
        return mu.densities.empty() && mu.atomic.empty() && mu.cantors.size() == 1;
    }

    /// M{ ||alpha2|| <= eps }: exact for atomic and Cantor measures, Monte
    /// Carlo with a reported standard error otherwise.
    [[nodiscard]] DiagonalMassResult diagonal_mass(double eps, int samples = 65536,
                                                   std::uint64_t seed = 42) const {
        if (eps <= 0.0) throw std::invalid_argument("diagonal_mass: eps must be positive");
        DiagonalMassResult res;
        if (purely_atomic()) {
            const auto& atoms = mu.atomic[0].atoms;
            std::vector<double> parts;
            for (const auto& ai : atoms)
                for (const auto& aj : atoms) {
                    double d = 0.0;
                    for (std::size_t k = 0; k < ai.location.size(); ++k)
                        d = std::max(d, std::abs(aj.location[k] - ai.location[k]));
                    if (d <= eps) parts.push_back(ai.weight * aj.weight);
                }
            res.value = pairwise_sum(parts);
            res.exact = true;
            return res;
        }
        if (purely_cantor()) {
            const auto& c = mu.cantors[0];
            const std::uint32_t n = 1U << c.depth;
            std::vector<double> mid(n), w(n);
            for (std::uint32_t s = 0; s < n; ++s) {
                mid[s] = c.midpoint(s);
                w[s] = c.mass * c.cylinder_weight(s);
            }
            // midpoints are increasing in the digit order; two-pointer window
            std::vector<double> parts;
            std::size_t lo = 0;
            for (std::uint32_t i = 0; i < n; ++i) {
                while (lo < n && mid[i] - mid[lo] > eps) ++lo;
                for (std::size_t j = lo; j < n && mid[j] - mid[i] <= eps; ++j)
                    parts.push_back(w[i] * w[j]);
            }
            res.value = pairwise_sum(parts);
            res.exact = true;
            return res;
        }
        // Monte Carlo over independent pairs
        RngStream rng(seed, 7);
        const double total = mu.total_mass();
        double hits = 0.0;
        for (int i = 0; i < samples; ++i) {
            auto [a1, a2] = sample(rng);
            if (sup_norm(a2) <= eps) hits += 1.0;
        }
        const double p = hits / samples;
        res.value = p * total * total;
        res.standard_error = total * total * std::sqrt(std::max(0.0, p * (1.0 - p) / samples));
        res.exact = false;
        return res;
    }
};

inline ProductMeasure product_measure(TransverseMeasure mu) { return {std::move(mu)}; }

}  // namespace lamlab
