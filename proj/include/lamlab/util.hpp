#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lamlab {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

constexpr double kPi = 3.14159265358979323846;

/// Sum in a fixed pairwise order. Deterministic regardless of how the
/// values were produced, and more accurate than a running sum.
inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(xs.subspan(0, h)) + pairwise_sum(xs.subspan(h));
}

inline Complex pairwise_sum(std::span<const Complex> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return {};
    if (n <= 8) {
        Complex s = 0.0;
        for (Complex x : xs) s += x;
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(xs.subspan(0, h)) + pairwise_sum(xs.subspan(h));
}

/// Accumulator that preserves a fixed reduction order: values are kept in
/// insertion order and reduced pairwise on demand.
class Accumulator {
public:
    void add(double x) { values_.push_back(x); }
    [[nodiscard]] double total() const { return pairwise_sum(values_); }
    [[nodiscard]] std::size_t count() const { return values_.size(); }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
};

/// Locale-independent shortest round-trip formatting; keeps report files
/// byte-identical across runs.
inline std::string format_double(double x) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf, ptr);
}

inline double sup_norm(const CVec& v) {
    double m = 0.0;
    for (const auto& c : v) m = std::max(m, std::abs(c));
    return m;
}

inline double euclid_norm(const CVec& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
}

inline CVec operator-(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("CVec size mismatch");
    CVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline CVec operator+(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("CVec size mismatch");
    CVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

}  // namespace lamlab
