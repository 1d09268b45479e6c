#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "z6/core_model.hpp"
#include "z6/equilibria.hpp"
#include "z6/ode.hpp"

namespace z6 {

inline constexpr double kDefaultIntegrateTol = 1e-10;
inline constexpr double kDefaultFixedPointTol = 1e-10;
inline constexpr double kHyperbolicityMargin = 1e-4;
/// |d theta / ds| below which a theta-parameterized integration is abandoned.
inline constexpr double kBreakdownTol = 1e-8;

/// Samples of an integration: independent variable plus a fixed-size state per sample.
struct Trajectory {
    std::size_t dim = 1;
    std::vector<double> independent;
    std::vector<double> states;
    ode::Stats stats;

    std::size_t size() const { return independent.size(); }
    std::span<const double> state(std::size_t i) const
    {
        return std::span<const double>(states).subspan(i * dim, dim);
    }
    double value(std::size_t i, std::size_t component = 0) const { return states[i * dim + component]; }
    void push(double t, std::span<const double> s)
    {
        independent.push_back(t);
        states.insert(states.end(), s.begin(), s.end());
    }
};

struct IntegrationOptions {
    double tol = kDefaultIntegrateTol;
    double breakdown_tol = kBreakdownTol;
    /// Upper bound on the step, which also bounds the spacing of the stored samples.
    double max_step = 0.0;
    std::size_t max_steps = 200000;
};

/// r(theta) from dr/dtheta = (dr/ds) / (dtheta/ds), starting at s0 and advancing theta by
/// theta_span (negative spans integrate backwards in theta). Samples are (theta, r).
/// Throws SectionBreakdown when |dtheta/ds| drops below the breakdown tolerance.
Trajectory integrate_polar(const SystemParams& params, const PolarState& s0, double theta_span,
                           double tol = kDefaultIntegrateTol);
Trajectory integrate_polar(const SystemParams& params, const PolarState& s0, double theta_span,
                           const IntegrationOptions& options);

/// The Abel equation over theta in [0, 2 pi]; samples are (theta, x). Throws BlowUp past |x| = 1e6.
Trajectory integrate_abel(const SystemParams& params, double x0, double tol = kDefaultIntegrateTol);
Trajectory integrate_abel(const SystemParams& params, double x0, const IntegrationOptions& options);

/// The cartesian system in original time; samples are (t, x, y).
Trajectory integrate_cartesian(const SystemParams& params, const CartesianState& s0, double t_end,
                               const IntegrationOptions& options = {});

enum class ReturnMethod { Angular, Cartesian };

struct ReturnMapSample {
    double rho_in = 0.0;
    double rho_out = 0.0;
    /// dPi/drho from the variational equation. Positive for angular returns; a cartesian return
    /// whose final orientation differs from the starting one can give a negative value.
    double multiplier = 1.0;
    /// +1 when theta increases through the section at the return, -1 when it decreases.
    int orientation = 1;
    ReturnMethod method = ReturnMethod::Angular;
};

struct ReturnMapOptions {
    double tol = kDefaultIntegrateTol;
    double breakdown_tol = kBreakdownTol;
    /// Hand trajectories that reach the curve dtheta/ds = 0 to the cartesian integrator.
    bool cartesian_fallback = true;
    /// Skip the theta-parameterized integration altogether.
    bool force_cartesian = false;
    std::size_t max_steps = 100000;
};

/// First return to the half-line theta = 0 of the orbit through (rho, 0), in the forward
/// time direction, with its derivative.
ReturnMapSample return_map(const SystemParams& params, double rho, double tol = kDefaultIntegrateTol);
ReturnMapSample return_map(const SystemParams& params, double rho, const ReturnMapOptions& options);

enum class CycleStability { Stable, Unstable };
enum class Hyperbolicity { Hyperbolic, NonHyperbolicWithinTolerance };

struct LimitCycle {
    /// Fixed point of the return map on theta = 0, in the r = |z|^2 coordinate.
    double rho_star = 0.0;
    /// Pi(rho_star) - rho_star at the accepted fixed point.
    double residual = 0.0;
    double multiplier = 1.0;
    CycleStability stability = CycleStability::Stable;
    Hyperbolicity hyperbolicity = Hyperbolicity::Hyperbolic;
    int orientation = 1;
    /// (theta, r) samples over one turn.
    Trajectory orbit;
    /// Equilibria (origin included) enclosed by the orbit.
    int surrounded_equilibria = 0;

    std::vector<CartesianState> orbit_points() const;
};

struct CycleOptions {
    double tol_integrate = kDefaultIntegrateTol;
    double tol_fixed_point = kDefaultFixedPointTol;
    double hyperbolicity_margin = kHyperbolicityMargin;
    std::size_t orbit_samples = 3600;
    EquilibriaOptions equilibria;
};

/// Bracket on the section: just outside the curve dtheta/ds = 0 (or near the origin when that
/// curve is empty) up to the radius where the Cherkas coordinate is 0.99 of the way to 1/c.
std::pair<double, double> default_bracket(const SystemParams& params);

/// Safeguarded Newton on g(rho) = Pi(rho) - rho inside a sign-changing bracket.
/// Throws NotFound without a sign change; SectionBreakdown propagates.
LimitCycle find_limit_cycle(const SystemParams& params, std::pair<double, double> bracket,
                            double tol_fp = kDefaultFixedPointTol);
LimitCycle find_limit_cycle(const SystemParams& params, std::pair<double, double> bracket,
                            const CycleOptions& options);

/// Number of points strictly enclosed by a closed polygon, via winding numbers.
int count_enclosed(const std::vector<CartesianState>& polygon, const std::vector<CartesianState>& points);

struct ScanNode {
    double rho = 0.0;
    bool valid = false;
    double g = 0.0;
    double multiplier = 1.0;
    int orientation = 1;
    ReturnMethod method = ReturnMethod::Angular;
};

struct ScanResult {
    std::vector<LimitCycle> cycles;
    /// Return map is the identity to tolerance at every sampled radius (a center annulus).
    bool degenerate = false;
    /// Radii skipped because the return map could not be evaluated.
    std::vector<double> gaps;
    std::vector<ScanNode> nodes;
};

struct ScanOptions {
    CycleOptions cycle;
    ReturnMapOptions return_map;
    /// The smallest radius is rho_max * min_radius_ratio.
    double min_radius_ratio = 1e-4;
    /// |g| <= degenerate_tol * rho at every node flags a continuum of closed orbits.
    double degenerate_tol = 1e-8;
};

/// Samples g on n log-spaced radii in (0, rho_max], solves every sign-changing bracket and
/// deduplicates fixed points within 1e-6.
ScanResult scan_cycles(const SystemParams& params, double rho_max, int n, const ScanOptions& options = {});

/// Default upper radius for scans: the outer end of default_bracket.
double default_scan_radius(const SystemParams& params);

const char* to_string(CycleStability s);
const char* to_string(Hyperbolicity h);
const char* to_string(ReturnMethod m);

}  // namespace z6
