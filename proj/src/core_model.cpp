#include "z6/core_model.hpp"

#include <cmath>
#include <sstream>

#include "z6/errors.hpp"

namespace z6 {

SystemParams SystemParams::make(double p1, double p2, double s1, double s2)
{
    if (!std::isfinite(p1) || !std::isfinite(p2) || !std::isfinite(s1) || !std::isfinite(s2)) {
        throw InvalidInput("system parameters must be finite");
    }
    return SystemParams{p1, p2, s1, s2};
}

std::vector<std::string> SystemParams::boundary_warnings() const
{
    std::vector<std::string> out;
    if (p2 != 0.0 && std::abs(p2) < kBoundaryWarning) {
        std::ostringstream msg;
        msg << "p2 = " << p2 << " is within " << kBoundaryWarning << " of the p2 = 0 boundary";
        out.push_back(msg.str());
    }
    if (std::abs(std::abs(s2) - 1.0) < kBoundaryWarning) {
        std::ostringstream msg;
        msg << "|s2| = " << std::abs(s2) << " is within " << kBoundaryWarning
            << " of the |s2| = 1 boundary";
        out.push_back(msg.str());
    }
    return out;
}

void SystemParams::require_regular_regime(const char* what) const
{
    if (!rotation_defined()) {
        throw RegimeError(std::string(what) + " requires p2 != 0");
    }
    if (!infinity_regular()) {
        throw RegimeError(std::string(what) + " requires |s2| > 1");
    }
}

double normalize_angle(double theta)
{
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) {
        t += kTwoPi;
    }
    // fmod of a value just below a multiple of 2 pi may round up to 2 pi.
    return t >= kTwoPi ? 0.0 : t;
}

int sextant_index(double theta)
{
    const int k = static_cast<int>(std::floor(normalize_angle(theta) / kSextant));
    return k > 5 ? 5 : k;
}

PolarState to_polar(const CartesianState& s)
{
    return PolarState{s.x * s.x + s.y * s.y, normalize_angle(std::atan2(s.y, s.x))};
}

CartesianState to_cartesian(const PolarState& s)
{
    const double m = std::sqrt(s.r);
    return CartesianState{m * std::cos(s.theta), m * std::sin(s.theta)};
}

Complex eval_complex_field(const SystemParams& params, Complex z)
{
    const Complex zb = std::conj(z);
    const Complex p{params.p1, params.p2};
    const Complex s{params.s1, params.s2};
    const Complex zb2 = zb * zb;
    return p * z * z * zb + s * z * z * z * zb2 - zb2 * zb2 * zb;
}

CartesianRates eval_cartesian_field(const SystemParams& params, const CartesianState& s)
{
    const auto [p1, p2, s1, s2] = params;
    const double x = s.x;
    const double y = s.y;
    const double x2 = x * x;
    const double y2 = y * y;
    const double x3 = x2 * x;
    const double y3 = y2 * y;
    const double x4 = x2 * x2;
    const double y4 = y2 * y2;

    const double dx = (p1 * x3 - p2 * x2 * y + p1 * x * y2 - p2 * y3) + (s1 - 1.0) * x4 * x -
                      s2 * x4 * y + (2.0 * s1 + 10.0) * x3 * y2 - 2.0 * s2 * x2 * y3 +
                      (s1 - 5.0) * x * y4 - s2 * y4 * y;
    const double dy = (p2 * x3 + p1 * x2 * y + p2 * x * y2 + p1 * y3) + s2 * x4 * x +
                      (s1 + 5.0) * x4 * y + 2.0 * s2 * x3 * y2 + (2.0 * s1 - 10.0) * x2 * y3 +
                      s2 * x * y4 + (s1 + 1.0) * y4 * y;
    return CartesianRates{dx, dy};
}

PolarRates eval_polar_field(const SystemParams& params, const PolarState& s)
{
    const double phi = 6.0 * s.theta;
    return PolarRates{
        2.0 * s.r * params.p1 + 2.0 * s.r * s.r * (params.s1 - std::cos(phi)),
        params.p2 + s.r * (params.s2 + std::sin(phi)),
    };
}

Matrix2 cartesian_jacobian(const SystemParams& params, const CartesianState& s)
{
    // df = f_z dz + f_zb dzb, so df/dx = f_z + f_zb and df/dy = i (f_z - f_zb).
    const Complex z{s.x, s.y};
    const Complex zb = std::conj(z);
    const Complex p{params.p1, params.p2};
    const Complex q{params.s1, params.s2};
    const Complex f_z = 2.0 * p * z * zb + 3.0 * q * z * z * zb * zb;
    const Complex f_zb = p * z * z + 2.0 * q * z * z * z * zb - 5.0 * zb * zb * zb * zb;
    const Complex fx = f_z + f_zb;
    const Complex fy = Complex{0.0, 1.0} * (f_z - f_zb);
    return Matrix2{{{fx.real(), fy.real()}, {fx.imag(), fy.imag()}}};
}

Matrix2 polar_jacobian(const SystemParams& params, const PolarState& s)
{
    const double phi = 6.0 * s.theta;
    const double r = s.r;
    return Matrix2{{
        {2.0 * params.p1 + 4.0 * r * (params.s1 - std::cos(phi)), 12.0 * r * r * std::sin(phi)},
        {params.s2 + std::sin(phi), 6.0 * r * std::cos(phi)},
    }};
}

double divergence(const SystemParams& params, const CartesianState& s)
{
    const double r = s.x * s.x + s.y * s.y;
    return 4.0 * params.p1 * r + 6.0 * params.s1 * r * r;
}

bool is_hamiltonian(const SystemParams& params)
{
    return params.p1 == 0.0 && params.s1 == 0.0;
}

double equivariance_defect(const SystemParams& params, Complex z, int k)
{
    if (k % 6 == 0) {
        return 0.0;
    }
    const Complex g = std::polar(1.0, kTwoPi * static_cast<double>(k) / 6.0);
    return std::abs(eval_complex_field(params, g * z) - g * eval_complex_field(params, z));
}

}  // namespace z6
