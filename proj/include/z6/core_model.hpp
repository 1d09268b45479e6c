#pragma once

// The quintic Z6-equivariant field
//
//   z' = (p1 + i p2) z^2 conj(z) + (s1 + i s2) z^3 conj(z)^2 - conj(z)^5
//
// in its complex, cartesian and polar forms. The polar form uses r = |z|^2
// (z = sqrt(r) e^{i theta}) and the rescaled time s with ds/dt = r, so
//
//   dr/ds     = 2 p1 r + 2 r^2 (s1 - cos 6 theta)
//   dtheta/ds = p2 + r (s2 + sin 6 theta).

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace z6 {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSextant = std::numbers::pi / 3.0;

/// Distance to the p2 = 0 / |s2| = 1 boundaries below which a warning is issued.
inline constexpr double kBoundaryWarning = 1e-9;

struct SystemParams {
    double p1 = 0.0;
    double p2 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;

    /// Throws InvalidInput unless all four fields are finite.
    static SystemParams make(double p1, double p2, double s1, double s2);

    bool rotation_defined() const { return p2 != 0.0; }
    bool infinity_regular() const { return s2 > 1.0 || s2 < -1.0; }

    /// Human-readable warnings for parameters within kBoundaryWarning of a regime boundary.
    std::vector<std::string> boundary_warnings() const;

    /// Throws RegimeError unless p2 != 0 and |s2| > 1.
    void require_regular_regime(const char* what) const;

    bool operator==(const SystemParams&) const = default;
};

/// Polar state; r is |z|^2, theta in [0, 2 pi).
struct PolarState {
    double r = 0.0;
    double theta = 0.0;
};

struct CartesianState {
    double x = 0.0;
    double y = 0.0;
};

struct PolarRates {
    double dr = 0.0;
    double dtheta = 0.0;
};

struct CartesianRates {
    double dx = 0.0;
    double dy = 0.0;
};

/// Row-major 2x2 matrix.
using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Reduces an angle to [0, 2 pi).
double normalize_angle(double theta);

/// Index k of the sector [k pi/3, (k+1) pi/3) containing theta.
int sextant_index(double theta);

PolarState to_polar(const CartesianState& s);
CartesianState to_cartesian(const PolarState& s);

Complex eval_complex_field(const SystemParams& params, Complex z);
CartesianRates eval_cartesian_field(const SystemParams& params, const CartesianState& s);
PolarRates eval_polar_field(const SystemParams& params, const PolarState& s);

/// Jacobian of (P, Q) with respect to (x, y).
Matrix2 cartesian_jacobian(const SystemParams& params, const CartesianState& s);

/// Jacobian of the polar field with respect to (r, theta).
Matrix2 polar_jacobian(const SystemParams& params, const PolarState& s);

/// dP/dx + dQ/dy = 4 p1 |z|^2 + 6 s1 |z|^4.
double divergence(const SystemParams& params, const CartesianState& s);

/// True iff p1 == 0 and s1 == 0 exactly.
bool is_hamiltonian(const SystemParams& params);

/// |f(g z) - g f(z)| for the rotation g = exp(2 pi i k / 6).
double equivariance_defect(const SystemParams& params, Complex z, int k);

/// c(theta) = s2 + sin 6 theta.
inline double angular_coefficient(const SystemParams& params, double theta)
{
    return params.s2 + std::sin(6.0 * theta);
}

}  // namespace z6
