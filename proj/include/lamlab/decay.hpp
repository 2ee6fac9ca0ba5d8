#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "lamlab/cycle.hpp"
#include "lamlab/inequality.hpp"
#include "lamlab/product_family.hpp"

namespace lamlab {

struct DecayRow {
    double lambda = 1.0;
    double mass_total = 0.0;
    double mass_near = 0.0;  // ||alpha2|| <= 1/lambda stratum (ties near)
    double mass_far = 0.0;
    double standard_error = 0.0;
    long long samples = 0;
};

struct DecayOptions {
    int mass_order = 6;       // quadrature order inside the graph-mass fast paths
    int window_radial = 6;    // inner b-window orders (density measures)
    int window_angular = 12;
    double window_safety = 1.3;
    std::optional<InequalityFit> fit;  // reuse a fit instead of fitting here
};

struct DecayReport {
    std::string scenario;
    std::vector<double> lambda_grid;
    std::vector<DecayRow> rows;
    Region K;
    double rho = 0.5;
    std::uint64_t seed = 0;
    long long samples_requested = 0;
    std::string method;
    InequalityFit fit;

    [[nodiscard]] std::string csv() const {
        std::string out = "lambda,mass_total,mass_near,mass_far,stderr,samples\n";
        for (const auto& r : rows) {
            out += format_double(r.lambda) + "," + format_double(r.mass_total) + "," +
                   format_double(r.mass_near) + "," + format_double(r.mass_far) + "," +
                   format_double(r.standard_error) + "," + std::to_string(r.samples) + "\n";
        }
        return out;
    }

    [[nodiscard]] nlohmann::ordered_json json() const {
        nlohmann::ordered_json j;
        j["scenario"] = scenario;
        j["seed"] = seed;
        j["samples"] = samples_requested;
        j["lambda_grid"] = lambda_grid;
        j["rho"] = rho;
        j["method"] = method;
        j["K_radii"] = K.radii;
        j["fit"] = {{"c1", fit.c1},   {"c2", fit.c2},           {"c3", fit.c3},
                    {"k", fit.k_deriv}, {"alpha_max", fit.alpha_max}, {"samples", fit.samples}};
        j["rows"] = nlohmann::ordered_json::array();
        for (const auto& r : rows)
            j["rows"].push_back({{"lambda", r.lambda},
                                 {"mass_total", r.mass_total},
                                 {"mass_near", r.mass_near},
                                 {"mass_far", r.mass_far},
                                 {"stderr", r.standard_error},
                                 {"samples", r.samples}});
        return j;
    }
};

namespace detail {

struct DecayEngine {
    const ProductFamily& P;
    const Region& K;
    const InequalityFit& fit;
    const DecayOptions& opt;
    KSplit S;
    RescaledMassOptions mopt;

    DecayEngine(const ProductFamily& p, const Region& k, const InequalityFit& f, const DecayOptions& o)
        : P(p), K(k), fit(f), opt(o), S(split_region(k, p.q(), p.codim())) {
        mopt.order = o.mass_order;
        // the b-windows are centered at a, which needs the fiber blocks of K
        // centered at 0 (true for the default K and for K*)
        for (const auto& c : S.cf)
            if (std::abs(c) > 1e-15)
                throw std::invalid_argument("decay engine: K fiber blocks must be centered at 0");
        for (const auto& c : S.cg)
            if (std::abs(c) > 1e-15)
                throw std::invalid_argument("decay engine: K fiber blocks must be centered at 0");
    }

    [[nodiscard]] double kernel(Complex a, Complex b, double lambda) const {
        return rescaled_graph_mass(P, {a}, {b - a}, lambda, K, mopt);
    }

    /// Support radius in b around a at this lambda: beyond it the rescaled
    /// graph misses K by the left inequality.
    [[nodiscard]] double support_radius(double lambda) const {
        const double rg_eff = S.rg[0] + std::abs(S.cg[0]);
        if (P.base.structure == ZStructure::Constant) return rg_eff / lambda;
        const double rw_K = S.rw[0] + std::abs(S.cw[0]);
        const double k = 1.1 * fit.k_deriv * fit.alpha_max;
        return opt.window_safety * (rg_eff + k * rw_K) / (std::max(fit.c1, 1e-9) * lambda);
    }

    /// Whether the z'-gate admits any mass for this alpha1 (f depends only on
    /// alpha1, so a zero diagonal kernel kills the whole b-fiber).
    [[nodiscard]] bool gate(Complex a, double lambda) const { return kernel(a, a, lambda) > 0.0; }

    // ---- inner integrals over b for fixed a --------------------------------

    struct NearFar {
        double near = 0.0, far = 0.0;
    };

    [[nodiscard]] NearFar inner_atomic(const AtomicComponent& c, Complex a, double lambda) const {
        NearFar nf;
        std::vector<double> nears, fars;
        for (const auto& atom : c.atoms) {
            const Complex b = atom.location[0];
            const double m = kernel(a, b, lambda) * atom.weight;
            if (std::abs(b - a) <= 1.0 / lambda) {
                nears.push_back(m);
            } else {
                fars.push_back(m);
            }
        }
        nf.near = pairwise_sum(nears);
        nf.far = pairwise_sum(fars);
        return nf;
    }

    // precomputed graph values over the Cantor midpoints (constant families)
    std::vector<Complex> cantor_f;

    [[nodiscard]] double constant_mass(double lambda) const {
        const double rz = std::min(P.rho, S.rz[0]);
        const double rw = std::min(lambda * P.rho, S.rw[0]);
        double fac = 1.0;
        for (int k = 2; k <= 2 * P.q(); ++k) fac *= k;
        return fac * std::pow(2.0, 2 * P.q()) * (kPi * rz * rz) * (kPi * rw * rw);
    }

    [[nodiscard]] NearFar inner_cantor(const CantorComponent& c, const std::vector<double>& mids,
                                       const std::vector<double>& weights, Complex a,
                                       double lambda) const {
        NearFar nf;
        const double rs = support_radius(lambda);
        const double ar = a.real();
        auto lo = static_cast<std::size_t>(
            std::lower_bound(mids.begin(), mids.end(), ar - rs) - mids.begin());

        if (P.base.structure == ZStructure::Constant && !cantor_f.empty()) {
            // hit test on cached graph values; the kernel is all-or-nothing
            const Complex fa = P.base.eval({a}, CVec(1, Complex(0, 0)))[0];
            if (std::abs(fa - S.cf[0]) > S.rf[0]) return nf;
            const double m0 = constant_mass(lambda);
            const double cut = 1.0 / lambda;
            double near = 0.0, far = 0.0;
            for (std::size_t i = lo; i < mids.size() && mids[i] <= ar + rs; ++i) {
                if (std::abs(lambda * (cantor_f[i] - fa) - S.cg[0]) > S.rg[0]) continue;
                if (std::abs(mids[i] - ar) <= cut) {
                    near += weights[i];
                } else {
                    far += weights[i];
                }
            }
            nf.near = m0 * near;
            nf.far = m0 * far;
            return nf;
        }

        std::vector<double> nears, fars;
        for (std::size_t i = lo; i < mids.size() && mids[i] <= ar + rs; ++i) {
            const double m = kernel(a, Complex(mids[i], 0.0), lambda) * weights[i];
            if (m == 0.0) continue;
            if (std::abs(mids[i] - ar) <= 1.0 / lambda) {
                nears.push_back(m);
            } else {
                fars.push_back(m);
            }
        }
        nf.near = pairwise_sum(nears);
        nf.far = pairwise_sum(fars);
        return nf;
    }

    [[nodiscard]] NearFar inner_density(const DensityComponent& c, Complex a, double lambda) const {
        NearFar nf;
        const double rs = support_radius(lambda);
        const double r_near = std::min(rs, 1.0 / lambda);

        // exact fast path: constant family and uniform density (the kernel is
        // a constant times the measure of the b-window, clipped to the domain)
        if (P.base.structure == ZStructure::Constant && c.uniform) {
            const double m0 = kernel(a, a, lambda);
            if (m0 == 0.0) return nf;
            if (c.domain.kind == TransversalKind::ComplexPolydisc) {
                const double R = c.domain.radii[0];
                const Complex c0 = c.domain.centers[0];
                const double den = c.density(CVec{a});
                nf.near = m0 * den * disc_intersection_area(std::abs(a - c0), rs, R);
            } else {
                const auto& iv = c.domain.intervals[0];
                const double den = c.density(CVec{a});
                const double lo = std::max(iv.first, a.real() - rs);
                const double hi = std::min(iv.second, a.real() + rs);
                nf.near = m0 * den * std::max(0.0, hi - lo);
            }
            return nf;  // support radius is exact here, the far stratum is empty
        }

        auto wrapped = [&](Complex b) -> double {
            if (!c.domain.contains({b})) return 0.0;
            return kernel(a, b, lambda) * c.density(CVec{b});
        };

        if (c.domain.kind == TransversalKind::ComplexPolydisc) {
            // near: polar grid on the disc around a
            nf.near = integrate_disc_split<double>(
                a, r_near, [&](Complex b) { return wrapped(b); }, {}, opt.window_radial,
                opt.window_angular);
            if (rs > r_near) {
                // far: annulus [1/lambda, rs]
                const GaussRule& gl = gauss_legendre(opt.window_radial);
                std::vector<double> terms;
                for (int k = 0; k < opt.window_angular; ++k) {
                    const double th = 2.0 * kPi * k / opt.window_angular;
                    const Complex dir(std::cos(th), std::sin(th));
                    for (int i = 0; i < opt.window_radial; ++i) {
                        const double r =
                            0.5 * (rs + r_near) + 0.5 * (rs - r_near) * gl.x[i];
                        const double w = 0.5 * (rs - r_near) * gl.w[i] * (2.0 * kPi / opt.window_angular) * r;
                        terms.push_back(w * wrapped(a + r * dir));
                    }
                }
                nf.far = pairwise_sum(terms);
            }
        } else {
            const auto& iv = c.domain.intervals[0];
            auto seg = [&](double lo, double hi) -> double {
                lo = std::max(lo, iv.first);
                hi = std::min(hi, iv.second);
                if (hi <= lo) return 0.0;
                const GaussRule& gl = gauss_legendre(std::max(opt.window_radial * 2, 8));
                std::vector<double> terms;
                for (std::size_t i = 0; i < gl.x.size(); ++i) {
                    const double x = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gl.x[i];
                    terms.push_back(0.5 * (hi - lo) * gl.w[i] * wrapped(Complex(x, 0.0)));
                }
                return pairwise_sum(terms);
            };
            const double ar = a.real();
            nf.near = seg(ar - r_near, ar + r_near);
            if (rs > r_near) nf.far = seg(ar - rs, ar - r_near) + seg(ar + r_near, ar + rs);
        }
        return nf;
    }

    [[nodiscard]] NearFar inner_total(const TransverseMeasure& mu, Complex a, double lambda,
                                      const std::vector<double>& cantor_mids,
                                      const std::vector<double>& cantor_weights) const {
        NearFar nf;
        if (!gate(a, lambda)) return nf;
        for (const auto& c : mu.atomic) {
            const auto v = inner_atomic(c, a, lambda);
            nf.near += v.near;
            nf.far += v.far;
        }
        for (const auto& c : mu.densities) {
            const auto v = inner_density(c, a, lambda);
            nf.near += v.near;
            nf.far += v.far;
        }
        for (const auto& c : mu.cantors) {
            const auto v = inner_cantor(c, cantor_mids, cantor_weights, a, lambda);
            nf.near += v.near;
            nf.far += v.far;
        }
        return nf;
    }
};

inline std::vector<Complex> stratified_density_samples(const DensityComponent& c, int n,
                                                       std::uint64_t seed) {
    std::vector<Complex> out;
    out.reserve(n);
    RngStream rng(seed, 211);
    if (c.uniform && c.domain.kind == TransversalKind::ComplexPolydisc) {
        const double R = c.domain.radii[0];
        const Complex c0 = c.domain.centers[0];
        for (int i = 0; i < n; ++i) {
            const double u = (i + rng.next_double()) / n;
            const double th = 2.0 * kPi * rng.next_double();
            out.push_back(c0 + R * std::sqrt(u) * std::polar(1.0, th));
        }
        return out;
    }
    if (c.uniform && c.domain.kind == TransversalKind::RealBox) {
        const auto& iv = c.domain.intervals[0];
        for (int i = 0; i < n; ++i)
            out.push_back(Complex(iv.first + (iv.second - iv.first) * (i + rng.next_double()) / n, 0.0));
        return out;
    }
    for (int i = 0; i < n; ++i) out.push_back(TransverseMeasure::sample_density(c, rng)[0]);
    return out;
}

}  // namespace detail

/// Mass-decay curve M(lambda) of the rescaled self-product over K, with the
/// near/far stratum split at ||alpha2|| = 1/lambda (ties assigned near).
/// Atomic and Cantor measures are integrated exactly; density measures use
/// stratified outer samples with the inner b-integral evaluated by localized
/// quadrature (the same samples serve every lambda).
inline DecayReport decay_curve(const FoliatedCycleLocal& T, const Region& K,
                               const std::vector<double>& lambda_grid, int samples,
                               std::uint64_t seed, const DecayOptions& opt = {}) {
    if (!T.box.family.centered)
        throw std::invalid_argument("decay_curve: the cycle's family must be centered");
    if (T.box.family.codim != 1 || T.box.family.leaf_dim != 1)
        throw std::invalid_argument("decay_curve: implemented for q = 1, codim = 1 charts");
    for (double l : lambda_grid)
        if (l < 1.0) throw std::invalid_argument("decay_curve: lambda grid entries must be >= 1");

    ProductFamily P = build_product(T.box.family, T.box.rho);
    InequalityFit fit = opt.fit ? *opt.fit : fit_inequality(P, T.box.rho, 256, seed + 1000);
    detail::DecayEngine eng(P, K, fit, opt);

    DecayReport rep;
    rep.lambda_grid = lambda_grid;
    rep.K = K;
    rep.rho = T.box.rho;
    rep.seed = seed;
    rep.samples_requested = samples;
    rep.fit = fit;

    const bool has_density = !T.mu.densities.empty();
    const bool has_cantor = !T.mu.cantors.empty();
    const bool has_atomic = !T.mu.atomic.empty();
    if (has_density) {
        rep.method = "stratified-mc-conditional";
    } else if (has_cantor) {
        rep.method = "exact-cantor-enumeration";
    } else {
        rep.method = "exact-atomic-enumeration";
    }

    // inner Cantor tables (sorted midpoints with weights)
    std::vector<double> cmids, cweights;
    if (has_cantor) {
        const auto& c = T.mu.cantors[0];
        const std::uint32_t n = 1U << c.depth;
        cmids.resize(n);
        cweights.resize(n);
        for (std::uint32_t s = 0; s < n; ++s) {
            cmids[s] = c.midpoint(s);
            cweights[s] = c.mass * c.cylinder_weight(s);
        }
        if (T.mu.cantors.size() > 1)
            throw std::invalid_argument("decay_curve: at most one Cantor component supported");
        if (P.base.structure == ZStructure::Constant) {
            eng.cantor_f.resize(cmids.size());
            for (std::size_t i = 0; i < cmids.size(); ++i)
                eng.cantor_f[i] = P.base.eval({Complex(cmids[i], 0.0)}, CVec(1, Complex(0, 0)))[0];
        }
    }

    // outer sample sets (drawn once, shared by every lambda)
    std::vector<std::vector<Complex>> density_samples;
    for (std::size_t ci = 0; ci < T.mu.densities.size(); ++ci)
        density_samples.push_back(
            detail::stratified_density_samples(T.mu.densities[ci], samples, seed + 7 * ci));

    for (double lambda : lambda_grid) {
        DecayRow row;
        row.lambda = lambda;
        double near = 0.0, far = 0.0, var = 0.0;
        long long count = 0;

        // atomic outer: exact
        for (const auto& c : T.mu.atomic)
            for (const auto& atom : c.atoms) {
                const auto nf = eng.inner_total(T.mu, atom.location[0], lambda, cmids, cweights);
                near += atom.weight * nf.near;
                far += atom.weight * nf.far;
                count += 1;
            }

        // cantor outer: exact cylinder enumeration
        if (has_cantor) {
            std::vector<double> nears(cmids.size()), fars(cmids.size());
            for (std::size_t i = 0; i < cmids.size(); ++i) {
                const auto nf =
                    eng.inner_total(T.mu, Complex(cmids[i], 0.0), lambda, cmids, cweights);
                nears[i] = cweights[i] * nf.near;
                fars[i] = cweights[i] * nf.far;
            }
            near += pairwise_sum(nears);
            far += pairwise_sum(fars);
            count += static_cast<long long>(cmids.size());
        }

        // density outer: stratified Monte Carlo over a, conditional on the
        // inner integral
        for (std::size_t ci = 0; ci < T.mu.densities.size(); ++ci) {
            const auto& c = T.mu.densities[ci];
            const auto& as = density_samples[ci];
            std::vector<double> nears(as.size()), fars(as.size());
            for (std::size_t i = 0; i < as.size(); ++i) {
                const auto nf = eng.inner_total(T.mu, as[i], lambda, cmids, cweights);
                nears[i] = nf.near;
                fars[i] = nf.far;
            }
            const double mn = pairwise_sum(nears) / static_cast<double>(as.size());
            const double mf = pairwise_sum(fars) / static_cast<double>(as.size());
            near += c.mass * mn;
            far += c.mass * mf;
            // conservative iid standard error of the per-sample totals
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t i = 0; i < as.size(); ++i) {
                const double v = nears[i] + fars[i];
                m1 += v;
                m2 += v * v;
            }
            m1 /= as.size();
            m2 /= as.size();
            const double sd = std::sqrt(std::max(0.0, m2 - m1 * m1) / as.size());
            var += c.mass * c.mass * sd * sd;
            count += static_cast<long long>(as.size());
        }

        row.mass_near = near;
        row.mass_far = far;
        row.mass_total = near + far;  // the identity M = M' + M'' holds by construction
        row.standard_error = std::sqrt(var);
        row.samples = count;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace lamlab
