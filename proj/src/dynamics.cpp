#include "z6/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "z6/abel.hpp"
#include "z6/errors.hpp"

namespace z6 {

namespace {

using ode::State;

ode::Options make_ode_options(double tol, double max_step, std::size_t max_steps)
{
    ode::Options o;
    o.rtol = tol;
    o.atol = tol;
    o.max_steps = max_steps;
    if (max_step > 0.0) {
        o.h_max = max_step;
    }
    return o;
}

// dr/dtheta and its r-derivative, which drives the variational equation.
struct AngularField {
    const SystemParams& params;
    double breakdown_tol;

    State<2> operator()(double theta, const State<2>& y) const
    {
        const double r = y[0];
        const double phi = 6.0 * theta;
        const double c = params.s2 + std::sin(phi);
        const double d = params.p2 + r * c;
        if (std::abs(d) < breakdown_tol || !std::isfinite(d)) {
            throw SectionBreakdown("trajectory reached the curve dtheta/ds = 0 at theta = " +
                                   std::to_string(theta));
        }
        const double n = 2.0 * r * params.p1 + 2.0 * r * r * (params.s1 - std::cos(phi));
        const double n_r = 2.0 * params.p1 + 4.0 * r * (params.s1 - std::cos(phi));
        const double f = n / d;
        const double f_r = (n_r * d - n * c) / (d * d);
        return {f, f_r * y[1]};
    }
};

// Cartesian field with the variational equation for an x-perturbation and the unwrapped angle.
struct CartesianFlow {
    const SystemParams& params;

    State<5> operator()(double, const State<5>& y) const
    {
        const CartesianState s{y[0], y[1]};
        const CartesianRates f = eval_cartesian_field(params, s);
        const Matrix2 j = cartesian_jacobian(params, s);
        const double rr = y[0] * y[0] + y[1] * y[1];
        const double dphi = rr > 0.0 ? (y[0] * f.dy - y[1] * f.dx) / rr : 0.0;
        return {f.dx, f.dy, j[0][0] * y[2] + j[0][1] * y[3], j[1][0] * y[2] + j[1][1] * y[3], dphi};
    }
};

void check_completed(ode::Status status, const char* what)
{
    switch (status) {
    case ode::Status::Completed:
    case ode::Status::Stopped:
        return;
    case ode::Status::StepSizeUnderflow:
        throw SectionBreakdown(std::string(what) + ": step size underflow");
    case ode::Status::MaxSteps:
        throw SectionBreakdown(std::string(what) + ": step limit reached");
    }
}

ReturnMapSample angular_return(const SystemParams& params, double rho, const ReturnMapOptions& opt)
{
    const double d0 = params.p2 + rho * params.s2;
    const int orientation = d0 > 0.0 ? 1 : -1;
    AngularField field{params, opt.breakdown_tol};
    const auto res = ode::integrate<2>(field, 0.0, State<2>{rho, 1.0}, orientation * kTwoPi,
                                       make_ode_options(opt.tol, 0.0, opt.max_steps));
    check_completed(res.status, "return_map");
    ReturnMapSample out;
    out.rho_in = rho;
    out.rho_out = res.y[0];
    out.multiplier = res.y[1];
    out.orientation = orientation;
    out.method = ReturnMethod::Angular;
    return out;
}

ReturnMapSample cartesian_return(const SystemParams& params, double rho, const ReturnMapOptions& opt)
{
    CartesianFlow flow{params};
    const double m = std::sqrt(rho);
    const State<5> y0{m, 0.0, 1.0, 0.0, 0.0};
    const double omega = rho * (std::abs(params.p2) + rho * (std::abs(params.s2) + 1.0));
    const double t_max = 200.0 * kTwoPi / std::max(omega, 1e-12);
    const double escape = 1e6 * (1.0 + rho);

    double prev_t = 0.0;
    State<5> prev = y0;
    bool crossed = false;
    double cross_target = 0.0;
    double last_t = 0.0;
    State<5> last = y0;
    auto observer = [&](double t, const State<5>& y) {
        if (y[0] * y[0] + y[1] * y[1] > escape) {
            throw SectionBreakdown("cartesian return map: trajectory escapes to infinity");
        }
        if (std::abs(y[4]) >= kTwoPi) {
            crossed = true;
            cross_target = y[4] > 0.0 ? kTwoPi : -kTwoPi;
            last_t = t;
            last = y;
            return false;
        }
        prev_t = t;
        prev = y;
        return true;
    };
    const auto res = ode::integrate<5>(flow, 0.0, y0, t_max, make_ode_options(opt.tol, 0.0, opt.max_steps),
                                       observer);
    if (!crossed) {
        check_completed(res.status, "cartesian return map");
        throw SectionBreakdown("cartesian return map: no full turn around the origin");
    }

    // Bisection on the step length for the crossing of the unwrapped angle.
    double lo = 0.0;
    double hi = last_t - prev_t;
    State<5> at = last;
    for (int it = 0; it < 80 && hi - lo > 1e-16 * (1.0 + prev_t); ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto step = ode::dopri_step<5>(flow, prev_t, prev, mid);
        if ((step.y[4] - cross_target) * (cross_target > 0.0 ? 1.0 : -1.0) >= 0.0) {
            hi = mid;
            at = step.y;
        } else {
            lo = mid;
        }
    }

    const CartesianRates f = eval_cartesian_field(params, CartesianState{at[0], at[1]});
    if (f.dy == 0.0) {
        throw SectionBreakdown("cartesian return map: tangential crossing of the section");
    }
    const double dx_dx0 = at[2] - f.dx / f.dy * at[3];
    ReturnMapSample out;
    out.rho_in = rho;
    out.rho_out = at[0] * at[0] + at[1] * at[1];
    out.multiplier = at[0] * dx_dx0 / m;
    out.orientation = cross_target > 0.0 ? 1 : -1;
    out.method = ReturnMethod::Cartesian;
    return out;
}

}  // namespace

Trajectory integrate_polar(const SystemParams& params, const PolarState& s0, double theta_span, double tol)
{
    IntegrationOptions opt;
    opt.tol = tol;
    return integrate_polar(params, s0, theta_span, opt);
}

Trajectory integrate_polar(const SystemParams& params, const PolarState& s0, double theta_span,
                           const IntegrationOptions& options)
{
    if (s0.r < 0.0) {
        throw InvalidInput("integrate_polar requires r >= 0");
    }
    Trajectory traj;
    traj.dim = 1;
    traj.push(s0.theta, std::span<const double>(&s0.r, 1));
    AngularField field{params, options.breakdown_tol};
    const auto res = ode::integrate<2>(
        field, s0.theta, State<2>{s0.r, 1.0}, s0.theta + theta_span,
        make_ode_options(options.tol, options.max_step, options.max_steps),
        [&](double t, const State<2>& y) {
            traj.push(t, std::span<const double>(y.data(), 1));
            return true;
        });
    check_completed(res.status, "integrate_polar");
    traj.stats = res.stats;
    return traj;
}

Trajectory integrate_abel(const SystemParams& params, double x0, double tol)
{
    IntegrationOptions opt;
    opt.tol = tol;
    return integrate_abel(params, x0, opt);
}

Trajectory integrate_abel(const SystemParams& params, double x0, const IntegrationOptions& options)
{
    const AbelCoefficients coeffs(params);
    constexpr double kBlowUp = 1e6;
    Trajectory traj;
    traj.dim = 1;
    traj.push(0.0, std::span<const double>(&x0, 1));
    auto rhs = [&](double theta, const State<1>& y) -> State<1> {
        if (!(std::abs(y[0]) <= kBlowUp)) {
            throw BlowUp("Abel solution exceeds |x| = 1e6 at theta = " + std::to_string(theta));
        }
        return {coeffs.rhs(y[0], theta)};
    };
    const auto res = ode::integrate<1>(rhs, 0.0, State<1>{x0}, kTwoPi,
                                       make_ode_options(options.tol, options.max_step, options.max_steps),
                                       [&](double t, const State<1>& y) {
                                           if (std::abs(y[0]) > kBlowUp) {
                                               throw BlowUp("Abel solution exceeds |x| = 1e6");
                                           }
                                           traj.push(t, std::span<const double>(y.data(), 1));
                                           return true;
                                       });
    if (res.status == ode::Status::StepSizeUnderflow || res.status == ode::Status::MaxSteps) {
        throw BlowUp("Abel integration failed to reach theta = 2 pi");
    }
    traj.stats = res.stats;
    return traj;
}

Trajectory integrate_cartesian(const SystemParams& params, const CartesianState& s0, double t_end,
                               const IntegrationOptions& options)
{
    Trajectory traj;
    traj.dim = 2;
    const State<2> y0{s0.x, s0.y};
    traj.push(0.0, y0);
    auto rhs = [&](double, const State<2>& y) -> State<2> {
        const CartesianRates f = eval_cartesian_field(params, CartesianState{y[0], y[1]});
        return {f.dx, f.dy};
    };
    const auto res = ode::integrate<2>(rhs, 0.0, y0, t_end,
                                       make_ode_options(options.tol, options.max_step, options.max_steps),
                                       [&](double t, const State<2>& y) {
                                           traj.push(t, y);
                                           return true;
                                       });
    if (res.status == ode::Status::StepSizeUnderflow || res.status == ode::Status::MaxSteps) {
        throw NumericalError("integrate_cartesian did not reach t_end");
    }
    traj.stats = res.stats;
    return traj;
}

ReturnMapSample return_map(const SystemParams& params, double rho, double tol)
{
    ReturnMapOptions opt;
    opt.tol = tol;
    return return_map(params, rho, opt);
}

ReturnMapSample return_map(const SystemParams& params, double rho, const ReturnMapOptions& options)
{
    if (!(rho > 0.0)) {
        throw InvalidInput("return_map requires rho > 0");
    }
    if (!params.rotation_defined()) {
        throw RegimeError("return_map requires p2 != 0");
    }
    if (options.force_cartesian) {
        return cartesian_return(params, rho, options);
    }
    try {
        if (std::abs(params.p2 + rho * params.s2) < options.breakdown_tol) {
            throw SectionBreakdown("section point lies on the curve dtheta/ds = 0");
        }
        return angular_return(params, rho, options);
    } catch (const SectionBreakdown&) {
        if (!options.cartesian_fallback) {
            throw;
        }
    }
    return cartesian_return(params, rho, options);
}

std::vector<CartesianState> LimitCycle::orbit_points() const
{
    std::vector<CartesianState> out;
    out.reserve(orbit.size());
    for (std::size_t i = 0; i < orbit.size(); ++i) {
        out.push_back(to_cartesian(PolarState{orbit.value(i), orbit.independent[i]}));
    }
    return out;
}

int count_enclosed(const std::vector<CartesianState>& polygon, const std::vector<CartesianState>& points)
{
    int count = 0;
    for (const CartesianState& p : points) {
        double winding = 0.0;
        for (std::size_t i = 0; i < polygon.size(); ++i) {
            const CartesianState& a = polygon[i];
            const CartesianState& b = polygon[(i + 1) % polygon.size()];
            const double ax = a.x - p.x, ay = a.y - p.y;
            const double bx = b.x - p.x, by = b.y - p.y;
            winding += std::atan2(ax * by - ay * bx, ax * bx + ay * by);
        }
        if (std::lround(std::abs(winding) / kTwoPi) != 0) {
            ++count;
        }
    }
    return count;
}

std::pair<double, double> default_bracket(const SystemParams& params)
{
    params.require_regular_regime("default_bracket");
    const double c0 = params.s2;
    // Outer end: Cherkas x at 0.99 of the way to the image 1/c of infinity, from whichever side
    // the positive r half-line maps to.
    const double x_outer = params.p2 * c0 > 0.0 ? 0.99 / c0 : 1.0 / (0.99 * c0);
    const double outer = cherkas_inverse(params, x_outer, 0.0);
    const double inner = params.p2 * params.s2 < 0.0 ? (-params.p2 / params.s2) * (1.0 + 1e-3) : 1e-3 * outer;
    return {inner, outer};
}

double default_scan_radius(const SystemParams& params)
{
    return default_bracket(params).second;
}

LimitCycle find_limit_cycle(const SystemParams& params, std::pair<double, double> bracket, double tol_fp)
{
    CycleOptions opt;
    opt.tol_fixed_point = tol_fp;
    return find_limit_cycle(params, bracket, opt);
}

LimitCycle find_limit_cycle(const SystemParams& params, std::pair<double, double> bracket,
                            const CycleOptions& options)
{
    auto [lo, hi] = bracket;
    if (!(lo > 0.0) || !(hi > lo)) {
        throw InvalidInput("find_limit_cycle requires 0 < lo < hi");
    }
    ReturnMapOptions rm;
    // The fixed-point residual is only meaningful well above the integration error.
    rm.tol = std::min(options.tol_integrate, 1e-2 * options.tol_fixed_point);
    rm.cartesian_fallback = false;

    const ReturnMapSample at_lo = return_map(params, lo, rm);
    const ReturnMapSample at_hi = return_map(params, hi, rm);
    double g_lo = at_lo.rho_out - lo;
    double g_hi = at_hi.rho_out - hi;
    if (at_lo.orientation != at_hi.orientation || g_lo * g_hi > 0.0) {
        throw NotFound("no sign change of Pi(rho) - rho in the bracket");
    }

    ReturnMapSample best = std::abs(g_lo) < std::abs(g_hi) ? at_lo : at_hi;
    double rho = g_lo == 0.0 ? lo : (g_hi == 0.0 ? hi : 0.5 * (lo + hi));
    if (g_lo != 0.0 && g_hi != 0.0) {
        for (int it = 0; it < 200; ++it) {
            const ReturnMapSample s = return_map(params, rho, rm);
            const double g = s.rho_out - rho;
            if (std::abs(g) < std::abs(best.rho_out - best.rho_in)) {
                best = s;
            }
            if (std::abs(g) < options.tol_fixed_point) {
                break;
            }
            if ((g < 0.0) == (g_lo < 0.0)) {
                lo = rho;
            } else {
                hi = rho;
            }
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
                break;
            }
            const double slope = s.multiplier - 1.0;
            const double newton = slope != 0.0 ? rho - g / slope : std::numeric_limits<double>::quiet_NaN();
            rho = (std::isfinite(newton) && newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
        }
    }

    LimitCycle cycle;
    cycle.rho_star = best.rho_in;
    cycle.residual = best.rho_out - best.rho_in;
    cycle.multiplier = best.multiplier;
    cycle.orientation = best.orientation;
    cycle.stability = best.multiplier < 1.0 ? CycleStability::Stable : CycleStability::Unstable;
    cycle.hyperbolicity = std::abs(best.multiplier - 1.0) > options.hyperbolicity_margin
                              ? Hyperbolicity::Hyperbolic
                              : Hyperbolicity::NonHyperbolicWithinTolerance;

    IntegrationOptions io;
    io.tol = rm.tol;
    io.max_step = kTwoPi / static_cast<double>(std::max<std::size_t>(options.orbit_samples, 6));
    cycle.orbit = integrate_polar(params, PolarState{cycle.rho_star, 0.0}, cycle.orientation * kTwoPi, io);

    std::vector<CartesianState> eq_points;
    for (const Equilibrium& e : solve_equilibria(params, options.equilibria)) {
        eq_points.push_back(CartesianState{e.x, e.y});
    }
    cycle.surrounded_equilibria = count_enclosed(cycle.orbit_points(), eq_points);
    return cycle;
}

ScanResult scan_cycles(const SystemParams& params, double rho_max, int n, const ScanOptions& options)
{
    if (n < 100) {
        throw InvalidInput("scan_cycles requires n >= 100");
    }
    if (!(rho_max > 0.0)) {
        throw InvalidInput("scan_cycles requires rho_max > 0");
    }
    ScanResult out;
    const double log_lo = std::log(rho_max * options.min_radius_ratio);
    const double log_hi = std::log(rho_max);
    for (int i = 0; i < n; ++i) {
        ScanNode node;
        node.rho = std::exp(log_lo + (log_hi - log_lo) * i / (n - 1));
        if (i == n - 1) {
            node.rho = rho_max;
        }
        try {
            const ReturnMapSample s = return_map(params, node.rho, options.return_map);
            node.valid = true;
            node.g = s.rho_out - node.rho;
            node.multiplier = s.multiplier;
            node.orientation = s.orientation;
            node.method = s.method;
        } catch (const NumericalError&) {
            out.gaps.push_back(node.rho);
        }
        out.nodes.push_back(node);
    }

    const bool any_valid = std::any_of(out.nodes.begin(), out.nodes.end(), [](const ScanNode& s) { return s.valid; });
    out.degenerate = any_valid && std::all_of(out.nodes.begin(), out.nodes.end(), [&](const ScanNode& s) {
                         return !s.valid || std::abs(s.g) <= options.degenerate_tol * std::max(1.0, s.rho);
                     });
    if (out.degenerate) {
        return out;
    }

    for (std::size_t i = 0; i + 1 < out.nodes.size(); ++i) {
        const ScanNode& a = out.nodes[i];
        const ScanNode& b = out.nodes[i + 1];
        if (!a.valid || !b.valid || a.method != ReturnMethod::Angular || b.method != ReturnMethod::Angular ||
            a.orientation != b.orientation) {
            continue;
        }
        if (!((a.g < 0.0 && b.g > 0.0) || (a.g > 0.0 && b.g < 0.0))) {
            continue;
        }
        try {
            LimitCycle cycle = find_limit_cycle(params, {a.rho, b.rho}, options.cycle);
            const bool duplicate = std::any_of(out.cycles.begin(), out.cycles.end(), [&](const LimitCycle& c) {
                return std::abs(c.rho_star - cycle.rho_star) < 1e-6;
            });
            if (!duplicate) {
                out.cycles.push_back(std::move(cycle));
            }
        } catch (const NumericalError&) {
            out.gaps.push_back(0.5 * (a.rho + b.rho));
        }
    }
    return out;
}

const char* to_string(CycleStability s)
{
    return s == CycleStability::Stable ? "Stable" : "Unstable";
}

const char* to_string(Hyperbolicity h)
{
    return h == Hyperbolicity::Hyperbolic ? "Hyperbolic" : "NonHyperbolicWithinTolerance";
}

const char* to_string(ReturnMethod m)
{
    return m == ReturnMethod::Angular ? "Angular" : "Cartesian";
}

}  // namespace z6
