#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta integration for small fixed-size systems.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

namespace z6::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Options {
    double rtol = 1e-10;
    double atol = 1e-10;
    /// Initial step magnitude; 0 picks one from the span.
    double h_init = 0.0;
    double h_min = 1e-14;
    double h_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 200000;
};

struct Stats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    /// Largest accepted local error estimate (max norm, absolute).
    double max_error = 0.0;
};

enum class Status { Completed, Stopped, StepSizeUnderflow, MaxSteps };

template <std::size_t N>
struct Result {
    Status status = Status::Completed;
    double t = 0.0;
    State<N> y{};
    Stats stats;
};

template <std::size_t N>
struct StepResult {
    State<N> y{};
    State<N> error{};
};

/// One Dormand-Prince step of size h (any sign) from (t, y).
template <std::size_t N, typename Rhs>
StepResult<N> dopri_step(Rhs& f, double t, const State<N>& y, double h)
{
    constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    State<N> tmp{};
    auto stage = [&](auto... terms) {
        for (std::size_t i = 0; i < N; ++i) {
            tmp[i] = y[i] + h * (... + (terms.first * (*terms.second)[i]));
        }
        return tmp;
    };
    using Term = std::pair<double, const State<N>*>;

    const State<N> k1 = f(t, y);
    const State<N> k2 = f(t + c2 * h, stage(Term{a21, &k1}));
    const State<N> k3 = f(t + c3 * h, stage(Term{a31, &k1}, Term{a32, &k2}));
    const State<N> k4 = f(t + c4 * h, stage(Term{a41, &k1}, Term{a42, &k2}, Term{a43, &k3}));
    const State<N> k5 =
        f(t + c5 * h, stage(Term{a51, &k1}, Term{a52, &k2}, Term{a53, &k3}, Term{a54, &k4}));
    const State<N> k6 = f(t + h, stage(Term{a61, &k1}, Term{a62, &k2}, Term{a63, &k3}, Term{a64, &k4},
                                       Term{a65, &k5}));
    StepResult<N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    const State<N> k7 = f(t + h, out.y);
    for (std::size_t i = 0; i < N; ++i) {
        out.error[i] =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    return out;
}

/// Adaptive integration from t0 to t1 (either direction). After every accepted step
/// observer(t, y) is called; returning false stops the integration with Status::Stopped.
/// Exceptions thrown by the right-hand side or the observer propagate.
template <std::size_t N, typename Rhs, typename Observer>
Result<N> integrate(Rhs&& f, double t0, const State<N>& y0, double t1, const Options& opt,
                    Observer&& observer)
{
    Result<N> res;
    res.t = t0;
    res.y = y0;
    const double span = t1 - t0;
    if (span == 0.0) {
        return res;
    }
    const double dir = span > 0.0 ? 1.0 : -1.0;
    double h = opt.h_init > 0.0 ? opt.h_init : std::min(std::abs(span) * 1e-3, 1e-2);
    h = std::min(h, opt.h_max);

    while (true) {
        const double remaining = (t1 - res.t) * dir;
        if (remaining <= 0.0) {
            res.status = Status::Completed;
            return res;
        }
        if (res.stats.steps + res.stats.rejected >= opt.max_steps) {
            res.status = Status::MaxSteps;
            return res;
        }
        const bool last = h >= remaining;
        const double step = last ? remaining : h;
        const StepResult<N> trial = dopri_step<N>(f, res.t, res.y, dir * step);

        double err = 0.0;
        double err_abs = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(res.y[i]), std::abs(trial.y[i]));
            err = std::max(err, std::abs(trial.error[i]) / sc);
            err_abs = std::max(err_abs, std::abs(trial.error[i]));
        }
        if (!std::isfinite(err)) {
            err = 1e10;
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            res.t = last ? t1 : res.t + dir * step;
            res.y = trial.y;
            ++res.stats.steps;
            res.stats.max_error = std::max(res.stats.max_error, err_abs);
            if (!observer(res.t, res.y)) {
                res.status = Status::Stopped;
                return res;
            }
            h = std::min(step * factor, opt.h_max);
            if (last) {
                res.status = Status::Completed;
                return res;
            }
        } else {
            ++res.stats.rejected;
            h = step * std::min(factor, 0.9);
            if (h < opt.h_min) {
                res.status = Status::StepSizeUnderflow;
                return res;
            }
        }
    }
}

template <std::size_t N, typename Rhs>
Result<N> integrate(Rhs&& f, double t0, const State<N>& y0, double t1, const Options& opt)
{
    return integrate<N>(std::forward<Rhs>(f), t0, y0, t1, opt, [](double, const State<N>&) { return true; });
}

}  // namespace z6::ode
