#include "z6/abel.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "z6/errors.hpp"

namespace z6 {

AbelCoefficients::AbelCoefficients(const SystemParams& params) : params_(params)
{
    if (!params.rotation_defined()) {
        throw RegimeError("the Abel reduction requires p2 != 0");
    }
}

double AbelCoefficients::a(double theta) const
{
    const auto [p1, p2, s1, s2] = params_;
    const double sn = std::sin(6.0 * theta);
    const double cs = std::cos(6.0 * theta);
    return 2.0 / p2 *
           (p1 - p2 * s1 * s2 + p1 * s2 * s2 + (2.0 * p1 * s2 - p2 * s1) * sn +
            (p2 * sn - p1 * cs + p2 * s2) * cs);
}

double AbelCoefficients::b(double theta) const
{
    const auto [p1, p2, s1, s2] = params_;
    const double sn = std::sin(6.0 * theta);
    const double cs = std::cos(6.0 * theta);
    return 2.0 / p2 * (p2 * s1 - 2.0 * p1 * s2 - 4.0 * p2 * cs - 2.0 * p1 * sn);
}

double AbelCoefficients::b_threshold_form(double theta) const
{
    const auto [p1, p2, s1, s2] = params_;
    const double sn = std::sin(6.0 * theta);
    const double cs = std::cos(6.0 * theta);
    return 2.0 / p2 * (p2 * s1 - 2.0 * p1 * s2 - p2 * cs - 2.0 * p1 * sn);
}

double AbelCoefficients::rhs(double x, double theta) const
{
    return ((a(theta) * x + b(theta)) * x + c()) * x;
}

double AbelCoefficients::rhs_dx(double x, double theta) const
{
    return (3.0 * a(theta) * x + 2.0 * b(theta)) * x + c();
}

AbelCoefficients abel_coefficients(const SystemParams& params)
{
    return AbelCoefficients(params);
}

SigmaThresholds sigma_thresholds(const SystemParams& params)
{
    if (!params.infinity_regular()) {
        throw RegimeError("sigma thresholds require |s2| > 1");
    }
    const auto [p1, p2, s1, s2] = params;
    const double d = s2 * s2 - 1.0;
    const double centre = p2 * s1 * s2;
    const double half_width = std::sqrt(p2 * p2 * (s1 * s1 + s2 * s2 - 1.0));
    SigmaThresholds out;
    out.sigma_a_minus = (centre - half_width) / d;
    out.sigma_a_plus = (centre + half_width) / d;
    out.sigma_b_minus = out.sigma_a_minus / 2.0;
    out.sigma_b_plus = out.sigma_a_plus / 2.0;
    // b() keeps sign iff (p2 s1 - 2 p1 s2)^2 >= 4 p1^2 + 16 p2^2.
    const double b_half_width = std::abs(p2) * std::sqrt(s1 * s1 + 16.0 * d);
    out.abel_b_minus = (centre - b_half_width) / (2.0 * d);
    out.abel_b_plus = (centre + b_half_width) / (2.0 * d);
    return out;
}

SystemParams at_sigma_a(double p2, double s1, double s2, bool plus)
{
    const SigmaThresholds t = sigma_thresholds(SystemParams{0.0, p2, s1, s2});
    return SystemParams::make(plus ? t.sigma_a_plus : t.sigma_a_minus, p2, s1, s2);
}

std::optional<UnitCircleZeros> a_zero_set(const SystemParams& params)
{
    const auto [p1, p2, s1, s2] = params;
    const double disc = p1 * p1 + p2 * p2 - (p2 * s1 - p1 * s2) * (p2 * s1 - p1 * s2);
    const double n = p1 * p1 + p2 * p2;
    if (disc < 0.0 || n == 0.0) {
        return std::nullopt;
    }
    const double sq = std::sqrt(disc);
    return UnitCircleZeros{
        (p1 * p2 * s1 - p1 * p1 * s2 + p2 * sq) / n,
        (p2 * p2 * s1 - p1 * p2 * s2 - p1 * sq) / n,
        (p1 * p2 * s1 - p1 * p1 * s2 - p2 * sq) / n,
        (p2 * p2 * s1 - p1 * p2 * s2 + p1 * sq) / n,
    };
}

std::optional<UnitCircleZeros> b_threshold_form_zero_set(const SystemParams& params)
{
    const auto [p1, p2, s1, s2] = params;
    const double disc =
        4.0 * p1 * p1 + p2 * p2 - (p2 * s1 - 2.0 * p1 * s2) * (p2 * s1 - 2.0 * p1 * s2);
    const double n = 4.0 * p1 * p1 + p2 * p2;
    if (disc < 0.0 || n == 0.0) {
        return std::nullopt;
    }
    const double sq = std::sqrt(disc);
    return UnitCircleZeros{
        (2.0 * p1 * p2 * s1 - 4.0 * p1 * p1 * s2 + p2 * sq) / n,
        (p2 * p2 * s1 - 2.0 * p1 * p2 * s2 - 2.0 * p1 * sq) / n,
        (2.0 * p1 * p2 * s1 - 4.0 * p1 * p1 * s2 - p2 * sq) / n,
        (p2 * p2 * s1 - 2.0 * p1 * p2 * s2 + 2.0 * p1 * sq) / n,
    };
}

double cherkas_forward(const SystemParams& params, const PolarState& s)
{
    const double c = angular_coefficient(params, s.theta);
    const double den = params.p2 + s.r * c;
    const double scale = std::abs(params.p2) + std::abs(s.r * c);
    if (std::abs(den) <= 1e-12 * scale) {
        throw SingularTransform("Cherkas map evaluated on the curve p2 + r c(theta) = 0");
    }
    return s.r / den;
}

double cherkas_inverse(const SystemParams& params, double x, double theta)
{
    const double c = angular_coefficient(params, theta);
    const double den = 1.0 - c * x;
    if (std::abs(den) <= 1e-12 * (1.0 + std::abs(c * x))) {
        throw SingularTransform("inverse Cherkas map evaluated on the image of infinity x = 1/c");
    }
    return params.p2 * x / den;
}

namespace {

struct SampledSign {
    double min = 0.0;
    double max = 0.0;
};

// Extremes over one period of a function of 6 theta: dense sampling, then Brent refinement
// around the best samples.
template <typename F>
SampledSign sample_extremes(F f)
{
    constexpr int kSamples = 10000;
    const double h = kSextant / kSamples;
    int imin = 0;
    int imax = 0;
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kSamples; ++i) {
        const double v = f(h * i);
        if (v < vmin) {
            vmin = v;
            imin = i;
        }
        if (v > vmax) {
            vmax = v;
            imax = i;
        }
    }
    const int bits = std::numeric_limits<double>::digits;
    const auto lo = boost::math::tools::brent_find_minima(f, h * (imin - 1), h * (imin + 1), bits);
    const auto hi = boost::math::tools::brent_find_minima([&](double t) { return -f(t); },
                                                          h * (imax - 1), h * (imax + 1), bits);
    return SampledSign{std::min(vmin, lo.second), std::max(vmax, -hi.second)};
}

bool changes_sign(const SampledSign& s)
{
    const double eps = 1e-13 * std::max(std::abs(s.min), std::abs(s.max));
    return s.min < -eps && s.max > eps;
}

void cross_check(const char* name, bool analytic_keeps, const SampledSign& sampled, double p1,
                 double lo, double hi)
{
    const bool sampled_keeps = !changes_sign(sampled);
    if (sampled_keeps == analytic_keeps) {
        return;
    }
    const double near = std::min(std::abs(p1 - lo) / (1.0 + std::abs(lo)),
                                 std::abs(p1 - hi) / (1.0 + std::abs(hi)));
    if (near <= 1e-7) {
        return;
    }
    throw ConsistencyError(std::string("sign certificate for ") + name +
                           ": threshold membership and sampling disagree");
}

}  // namespace

SignCertificate sign_certificate(const SystemParams& params)
{
    params.require_regular_regime("sign_certificate");
    const SigmaThresholds t = sigma_thresholds(params);
    const AbelCoefficients coeffs(params);
    const double p1 = params.p1;

    SignCertificate out;
    out.a_keeps_sign = !(t.sigma_a_minus < p1 && p1 < t.sigma_a_plus);
    out.b_keeps_sign = !(t.abel_b_minus < p1 && p1 < t.abel_b_plus);

    cross_check("A", out.a_keeps_sign, sample_extremes([&](double th) { return coeffs.a(th); }), p1,
                t.sigma_a_minus, t.sigma_a_plus);
    cross_check("B", out.b_keeps_sign, sample_extremes([&](double th) { return coeffs.b(th); }), p1,
                t.abel_b_minus, t.abel_b_plus);
    return out;
}

RegionReport region_report(const SystemParams& params, const EquilibriaOptions& options)
{
    params.require_regular_regime("region_report");
    RegionReport out;
    out.thresholds = sigma_thresholds(params);
    const double p1 = params.p1;
    out.condition_i = !(out.thresholds.sigma_a_minus < p1 && p1 < out.thresholds.sigma_a_plus);
    out.condition_ii = !(out.thresholds.sigma_b_minus < p1 && p1 < out.thresholds.sigma_b_plus);
    out.q = quadratic_form(params, options.q_zero_tol);
    out.equilibria_count = equilibrium_count(params, options);
    const SignCertificate signs = sign_certificate(params);
    out.a_keeps_sign = signs.a_keeps_sign;
    out.b_keeps_sign = signs.b_keeps_sign;
    out.certificate =
        (out.condition_i || out.condition_ii) ? Certificate::AtMostOneLC : Certificate::Inconclusive;
    return out;
}

const char* to_string(Certificate c)
{
    return c == Certificate::AtMostOneLC ? "AtMostOneLC" : "Inconclusive";
}

}  // namespace z6
