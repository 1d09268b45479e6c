#include "z6/equilibria.hpp"

#include <algorithm>
#include <cmath>

#include "z6/errors.hpp"

namespace z6 {

namespace {

Equilibrium make_origin(const SystemParams& params)
{
    Equilibrium e;
    e.branch = Branch::Origin;
    e.kind = is_hamiltonian(params) ? EquilibriumKind::Center : EquilibriumKind::Focus;
    e.index_hint = 1;
    return e;
}

// Reduced equilibrium equations for r > 0: the r-equation divided by 2r.
std::array<double, 2> reduced_field(const SystemParams& params, double r, double theta)
{
    const double phi = 6.0 * theta;
    return {params.p1 + r * (params.s1 - std::cos(phi)), params.p2 + r * (params.s2 + std::sin(phi))};
}

// Newton iteration on the reduced equations. Returns false when it fails to converge.
bool newton_polish(const SystemParams& params, double& r, double& theta, int max_iter)
{
    const double scale = 1.0 + std::abs(params.p1) + std::abs(params.p2);
    for (int it = 0; it < max_iter; ++it) {
        const auto f = reduced_field(params, r, theta);
        if (std::max(std::abs(f[0]), std::abs(f[1])) <= 1e-15 * scale * (1.0 + r)) {
            return true;
        }
        const double phi = 6.0 * theta;
        const double a = params.s1 - std::cos(phi);
        const double b = 6.0 * r * std::sin(phi);
        const double c = params.s2 + std::sin(phi);
        const double d = 6.0 * r * std::cos(phi);
        const double det = a * d - b * c;
        if (det == 0.0 || !std::isfinite(det)) {
            return false;
        }
        const double dr = (d * f[0] - b * f[1]) / det;
        const double dt = (-c * f[0] + a * f[1]) / det;
        r -= dr;
        theta -= dt;
        if (!std::isfinite(r) || !std::isfinite(theta)) {
            return false;
        }
        if (std::abs(dr) <= 1e-15 * (1.0 + std::abs(r)) && std::abs(dt) <= 1e-15) {
            return true;
        }
    }
    const auto f = reduced_field(params, r, theta);
    return std::max(std::abs(f[0]), std::abs(f[1])) <= 1e-11 * scale * (1.0 + r);
}

// Angle 3 theta in the sextant representative from the tan(3 theta) quadratic
//   (-p2 + p1 s2 - p2 s1) t^2 + 2 p1 t + (p2 + p1 s2 - p2 s1) = 0,
// switching to tau = cot(3 theta) when the leading coefficient is small.
double triple_angle(const SystemParams& params, double u, int branch_sign)
{
    const auto [p1, p2, s1, s2] = params;
    const double den = p2 - p1 * s2 + p2 * s1;
    const double c0 = p2 + p1 * s2 - p2 * s1;
    const double root_part = static_cast<double>(branch_sign) * u;
    if (std::abs(den) >= std::abs(c0)) {
        return std::atan((p1 + root_part) / den);
    }
    if (c0 == 0.0) {
        throw DegenerateError("both tan and cot parameterizations of the equilibria degenerate");
    }
    const double tau = (root_part - p1) / c0;
    return std::atan2(1.0, tau);
}

}  // namespace

QuadraticFormValue quadratic_form(const SystemParams& params, double zero_tol)
{
    const auto [p1, p2, s1, s2] = params;
    QuadraticFormValue out;
    out.value = (1.0 - s2 * s2) * p1 * p1 + (1.0 - s1 * s1) * p2 * p2 + 2.0 * s1 * s2 * p1 * p2;
    const double tol = zero_tol * (p1 * p1 + p2 * p2);
    if (std::abs(out.value) <= tol) {
        out.sign = Sign::Zero;
    } else {
        out.sign = out.value > 0.0 ? Sign::Positive : Sign::Negative;
    }
    out.u = out.sign == Sign::Positive ? std::sqrt(out.value) : 0.0;
    return out;
}

int equilibrium_count(const SystemParams& params, const EquilibriaOptions& options)
{
    params.require_regular_regime("equilibrium_count");
    if (params.s2 * params.p2 >= 0.0) {
        return 1;
    }
    switch (quadratic_form(params, options.q_zero_tol).sign) {
    case Sign::Negative:
        return 1;
    case Sign::Zero:
        return 7;
    case Sign::Positive:
        return 13;
    }
    return 1;
}

std::vector<Equilibrium> solve_equilibria(const SystemParams& params, const EquilibriaOptions& options)
{
    params.require_regular_regime("solve_equilibria");
    std::vector<Equilibrium> out{make_origin(params)};
    const QuadraticFormValue q = quadratic_form(params, options.q_zero_tol);
    if (params.s2 * params.p2 >= 0.0 || q.sign == Sign::Negative) {
        return out;
    }

    std::vector<std::pair<int, Branch>> branches;
    if (q.sign == Sign::Zero) {
        branches.emplace_back(1, Branch::Double);
    } else {
        // Labelled so that (r+, theta+) is the point whose eigenvalue product is
        // -12 (p1^2 + p2^2) u / (u - p1 s1 - p2 s2); that is the -u root of the arctan formula.
        branches.emplace_back(-1, Branch::Plus);
        branches.emplace_back(1, Branch::Minus);
    }

    for (const auto& [sign, branch] : branches) {
        double theta = triple_angle(params, q.u, sign) / 3.0;
        double r = -params.p2 / angular_coefficient(params, theta);
        if (branch != Branch::Double) {
            double rr = r;
            double tt = theta;
            if (newton_polish(params, rr, tt, 8) && rr > 0.0 &&
                std::abs(tt - theta) < 1e-6 && std::abs(rr - r) < 1e-6 * (1.0 + r)) {
                r = rr;
                theta = tt;
            }
        }
        for (int k = 0; k < 6; ++k) {
            Equilibrium e;
            e.branch = branch;
            e.r = r;
            e.theta = normalize_angle(theta + static_cast<double>(k) * kSextant);
            const CartesianState c = to_cartesian(PolarState{e.r, e.theta});
            e.x = c.x;
            e.y = c.y;
            out.push_back(classify_equilibrium(params, e, options));
        }
    }
    std::sort(out.begin() + 1, out.end(),
              [](const Equilibrium& a, const Equilibrium& b) { return a.theta < b.theta; });
    return out;
}

Equilibrium classify_equilibrium(const SystemParams& params, const Equilibrium& e,
                                 const EquilibriaOptions& options)
{
    if (e.is_origin() || e.r <= 0.0) {
        throw InvalidInput("classify_equilibrium: the origin is classified by the stability module");
    }
    Equilibrium out = e;
    const Matrix2 j = polar_jacobian(params, PolarState{e.r, e.theta});
    const double tr = j[0][0] + j[1][1];
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    const double disc = 0.25 * tr * tr - det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        // Avoid cancellation in the smaller root.
        const double big = tr >= 0.0 ? 0.5 * tr + s : 0.5 * tr - s;
        const double small = big != 0.0 ? det / big : 0.0;
        out.eigenvalues = {Complex{small, 0.0}, Complex{big, 0.0}};
    } else {
        const double s = std::sqrt(-disc);
        out.eigenvalues = {Complex{0.5 * tr, -s}, Complex{0.5 * tr, s}};
    }

    const double det_scale = std::abs(j[0][0] * j[1][1]) + std::abs(j[0][1] * j[1][0]);
    const bool q_zero = quadratic_form(params, options.q_zero_tol).sign == Sign::Zero;
    if (q_zero || e.branch == Branch::Double) {
        out.kind = EquilibriumKind::SaddleNode;
        out.index_hint = 0;
    } else if (std::abs(det) <= 1e-12 * det_scale) {
        out.kind = EquilibriumKind::Degenerate;
        out.index_hint = 0;
    } else if (det < 0.0) {
        out.kind = EquilibriumKind::Saddle;
        out.index_hint = -1;
    } else {
        out.kind = disc >= 0.0 ? EquilibriumKind::Node : EquilibriumKind::Focus;
        out.index_hint = 1;
    }
    return out;
}

double equilibrium_residual(const SystemParams& params, const Equilibrium& e)
{
    const PolarRates f = eval_polar_field(params, PolarState{e.r, e.theta});
    return std::hypot(f.dr, f.dtheta) / (1.0 + e.r * e.r);
}

std::vector<PolarState> brute_force_equilibria(const SystemParams& params, int grid_n)
{
    params.require_regular_regime("brute_force_equilibria");
    if (grid_n < 100) {
        throw InvalidInput("brute_force_equilibria requires grid_n >= 100");
    }
    const double r_max = 4.0 * std::abs(params.p2) / (std::abs(params.s2) - 1.0);
    const int nr = grid_n;
    const int nt = 6 * grid_n;
    const double dr = r_max / nr;
    const double dt = kTwoPi / nt;

    // Node values at r_i = (i + 1/2) dr, off the r = 0 line.
    std::vector<std::array<double, 2>> values(static_cast<std::size_t>((nr + 1) * (nt + 1)));
    auto at = [&](int i, int j) -> std::array<double, 2>& {
        return values[static_cast<std::size_t>(i * (nt + 1) + j)];
    };
    for (int i = 0; i <= nr; ++i) {
        for (int j = 0; j <= nt; ++j) {
            at(i, j) = reduced_field(params, dr * (i + 0.5), dt * j);
        }
    }

    auto mixed = [](double a, double b, double c, double d) {
        const bool pos = a > 0.0 || b > 0.0 || c > 0.0 || d > 0.0;
        const bool neg = a < 0.0 || b < 0.0 || c < 0.0 || d < 0.0;
        const bool zero = a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0;
        return (pos && neg) || zero;
    };

    std::vector<PolarState> roots;
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nt; ++j) {
            const auto& a = at(i, j);
            const auto& b = at(i + 1, j);
            const auto& c = at(i, j + 1);
            const auto& d = at(i + 1, j + 1);
            if (!mixed(a[0], b[0], c[0], d[0]) || !mixed(a[1], b[1], c[1], d[1])) {
                continue;
            }
            double r = dr * (i + 1.0);
            double theta = dt * (j + 0.5);
            if (!newton_polish(params, r, theta, 200) || r <= 0.0) {
                continue;
            }
            if (std::abs(r - dr * (i + 1.0)) > 3.0 * dr || std::abs(theta - dt * (j + 0.5)) > 3.0 * dt) {
                continue;
            }
            theta = normalize_angle(theta);
            const bool seen = std::any_of(roots.begin(), roots.end(), [&](const PolarState& s) {
                const double dth = std::abs(s.theta - theta);
                return std::abs(s.r - r) < 1e-6 * (1.0 + r) && std::min(dth, kTwoPi - dth) < 1e-6;
            });
            if (!seen) {
                roots.push_back(PolarState{r, theta});
            }
        }
    }
    std::sort(roots.begin(), roots.end(),
              [](const PolarState& a, const PolarState& b) { return a.theta < b.theta; });
    return roots;
}

const char* to_string(EquilibriumKind kind)
{
    switch (kind) {
    case EquilibriumKind::Focus:
        return "Focus";
    case EquilibriumKind::Node:
        return "Node";
    case EquilibriumKind::Saddle:
        return "Saddle";
    case EquilibriumKind::SaddleNode:
        return "SaddleNode";
    case EquilibriumKind::Center:
        return "Center";
    case EquilibriumKind::Degenerate:
        return "Degenerate";
    }
    return "Unknown";
}

const char* to_string(Sign sign)
{
    switch (sign) {
    case Sign::Negative:
        return "Negative";
    case Sign::Zero:
        return "Zero";
    case Sign::Positive:
        return "Positive";
    }
    return "Unknown";
}

}  // namespace z6
