#pragma once

// Dense single-variable polynomials with ascending coefficients, and real-root isolation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace z6 {

template <typename T>
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
    Polynomial(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<T>& coefficients() const { return c_; }
    T operator[](std::size_t i) const { return i < c_.size() ? c_[i] : T{}; }

    template <typename X>
    auto operator()(X x) const
    {
        decltype(T{} * x) acc{};
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            acc = acc * x + *it;
        }
        return acc;
    }

    Polynomial derivative() const
    {
        std::vector<T> d;
        for (std::size_t i = 1; i < c_.size(); ++i) {
            d.push_back(c_[i] * static_cast<double>(i));
        }
        return Polynomial(std::move(d));
    }

    /// Sum of |a_i| |x|^i, the natural scale of rounding errors in evaluating at x.
    double magnitude(double x) const
    {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            acc = acc * std::abs(x) + std::abs(*it);
        }
        return acc;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b)
    {
        std::vector<T> out(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = a[i] + b[i];
        }
        return Polynomial(std::move(out));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b)
    {
        std::vector<T> out(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = a[i] - b[i];
        }
        return Polynomial(std::move(out));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        if (a.is_zero() || b.is_zero()) {
            return {};
        }
        std::vector<T> out(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                out[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return Polynomial(std::move(out));
    }
    friend Polynomial operator*(const T& s, const Polynomial& p)
    {
        std::vector<T> out = p.c_;
        for (T& v : out) {
            v *= s;
        }
        return Polynomial(std::move(out));
    }

    bool operator==(const Polynomial&) const = default;

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == T{}) {
            c_.pop_back();
        }
    }

    std::vector<T> c_;
};

using RealPoly = Polynomial<double>;
using ComplexPoly = Polynomial<std::complex<double>>;

inline RealPoly real_part(const ComplexPoly& p)
{
    std::vector<double> out;
    for (const auto& v : p.coefficients()) {
        out.push_back(v.real());
    }
    return RealPoly(std::move(out));
}

inline constexpr double kRootPolishTol = 1e-12;
inline constexpr double kRootClusterTol = 1e-4;

/// A real root, or a cluster of real roots closer than the cluster tolerance.
struct RealRoot {
    double value = 0.0;
    /// Number of roots merged into the cluster; a touching root counts twice.
    int multiplicity = 1;
    /// The polynomial changes sign across the cluster (odd multiplicity).
    bool crossing = true;
};

/// Drops leading coefficients below rel * max |a_i|.
RealPoly trimmed(const RealPoly& p, double rel = 1e-14);

/// Cauchy bound: every root satisfies |x| < 1 + max |a_i / a_n|.
double root_bound(const RealPoly& p);

/// Real roots in [lo, hi], isolated on the monotone pieces between critical points and polished
/// by bracketing to kRootPolishTol. Critical points where the polynomial vanishes to rounding
/// are touching roots. Roots closer than cluster_tol are merged. Sorted ascending.
std::vector<RealRoot> real_roots(const RealPoly& p, double lo, double hi, double cluster_tol = kRootClusterTol);
/// All real roots.
std::vector<RealRoot> real_roots(const RealPoly& p, double cluster_tol = kRootClusterTol);

/// Sturm sequence p, p', -rem(...), ...
std::vector<RealPoly> sturm_sequence(const RealPoly& p);
/// Number of distinct real roots in (lo, hi] by the Sturm sign-variation count.
int sturm_count(const RealPoly& p, double lo, double hi);

}  // namespace z6
