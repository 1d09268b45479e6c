// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

#include "oracles.hpp"
#include "z6/abel.hpp"
#include "z6/core_model.hpp"
#include "z6/dynamics.hpp"
#include "z6/equilibria.hpp"
#include "z6/errors.hpp"
#include "z6/geometry.hpp"
#include "z6/stability.hpp"

using namespace z6;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

oracle::P as_oracle(const SystemParams& p)
{
    return {p.p1, p.p2, p.s1, p.s2};
}

// Jacobian of the complex definition by central differences.
Matrix2 oracle_jacobian(const SystemParams& p, double x, double y)
{
    const oracle::P o = as_oracle(p);
    const double h = 1e-6;
    auto f = [&](double a, double b) { return oracle::field(o, {a, b}); };
    const auto dx = (f(x + h, y) - f(x - h, y)) / (2 * h);
    const auto dy = (f(x, y + h) - f(x, y - h)) / (2 * h);
    return {{{dx.real(), dy.real()}, {dx.imag(), dy.imag()}}};
}

Outcome criterion1()
{
    const SigmaThresholds t = sigma_thresholds(SystemParams{0, -1, -0.5, 1.2});
    const double em = std::abs(t.sigma_a_minus - -0.52423);
    const double ep = std::abs(t.sigma_a_plus - 3.25151);
    return {em < 1e-4 && ep < 1e-4,
            fmt("sigma_a- = %.8f (err %.1e), sigma_a+ = %.8f (err %.1e)", t.sigma_a_minus, em, t.sigma_a_plus, ep)};
}

Outcome criterion2()
{
    const SystemParams p = at_sigma_a(-1, -0.5, 1.2, true);
    const auto eqs = solve_equilibria(p);
    const Equilibrium* hit = nullptr;
    for (const Equilibrium& e : eqs) {
        if (!e.is_origin() && std::abs(e.x - 1.358) < 5e-3 && std::abs(e.y - 1.5) < 5e-3) {
            hit = &e;
        }
    }
    if (hit == nullptr) {
        return {false, "no equilibrium within 5e-3 of (1.358, 1.5)"};
    }
    const Matrix2 j = oracle_jacobian(p, hit->x, hit->y);
    const double lambda = j[0][0] + j[1][1];
    double vx = j[0][1];
    double vy = lambda - j[0][0];
    const double n = std::hypot(vx, vy);
    vx /= n;
    vy /= n;
    const double rx = -0.8594 / std::hypot(0.8594, 0.5114);
    const double ry = -0.5114 / std::hypot(0.8594, 0.5114);
    const double angle = std::abs(std::asin(vx * ry - vy * rx));
    const SaddleNodeData sn = saddle_node_data(p);
    const double lib_angle = std::abs(std::asin(sn.eigenvector.x * ry - sn.eigenvector.y * rx));
    return {hit->kind == EquilibriumKind::SaddleNode && angle < 1e-3 && lib_angle < 1e-3,
            fmt("saddle-node (%.6f, %.6f), eigenvector angle %.2e rad (library %.2e), eigenvalue %.5f", hit->x,
                hit->y, angle, lib_angle, lambda)};
}

Outcome criterion3()
{
    const SystemParams p = at_sigma_a(-1, -0.5, 1.2, true);
    const SaddleNodeData sn = saddle_node_data(p);
    const double slope = 0.5114 / 0.8594;
    const CartesianState base{0.0, sn.equilibrium.y - slope * sn.equilibrium.x};
    const CartesianState dir{1.0, slope};
    const CartesianState normal{0.5114, -0.8594};
    const RealPoly q = scalar_product_poly(p, base, dir, normal);
    const double reference[6] = {-0.92289951077311, -2.33924612305747, -2.71272659052423,
                               4.86235167862649,  2.34410741916533,  -2.39191647949065};
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
        worst = std::max(worst, std::abs(q[i] - reference[i]) / std::abs(reference[i]));
    }
    // The polynomial agrees with the field evaluated pointwise.
    double sample_err = 0.0;
    for (int k = 0; k <= 20; ++k) {
        const double t = -2.0 + 0.2 * k;
        const auto f = oracle::field(as_oracle(p), {base.x + t * dir.x, base.y + t * dir.y});
        sample_err = std::max(sample_err, std::abs(q(t) - (f.real() * normal.x + f.imag() * normal.y)) /
                                              (1.0 + q.magnitude(t)));
    }
    int crossing = 0;
    double root = 0.0;
    for (const RealRoot& r : real_roots(q)) {
        if (r.crossing) {
            ++crossing;
            root = r.value;
        }
    }
    const bool ok = worst < 1e-6 && sample_err < 1e-12 && crossing == 1 && std::abs(root + 1.1737) < 1e-3;
    return {ok, fmt("max rel coefficient err %.2e, sign-changing roots %d, root %.7f", worst, crossing, root)};
}

Outcome criterion4()
{
    oracle::Rng rng(2024);
    int draws = 0;
    int mismatches = 0;
    int hist[3] = {0, 0, 0};
    while (draws < 60) {
        const double s2 = rng.sign() * rng.uniform(1.0500001, 5.0);
        const double p2 = rng.sign() * rng.uniform(0.1, 3.0);
        const SystemParams p = SystemParams::make(rng.uniform(-4, 4), p2, rng.uniform(-2, 2), s2);
        ++draws;
        const int closed = equilibrium_count(p);
        const int grid = oracle::grid_equilibrium_count(as_oracle(p));
        const int solved = static_cast<int>(solve_equilibria(p).size());
        const int brute = static_cast<int>(brute_force_equilibria(p, 150).size()) + 1;
        if (closed != grid || closed != solved || closed != brute) {
            ++mismatches;
            std::printf("  count mismatch at (%.17g, %.17g, %.17g, %.17g): law %d grid %d solved %d brute %d\n", p.p1,
                        p.p2, p.s1, p.s2, closed, grid, solved, brute);
        }
        hist[closed == 1 ? 0 : (closed == 7 ? 1 : 2)] += 1;
    }
    return {mismatches == 0,
            fmt("%d draws, %d mismatches (1: %d, 7: %d, 13: %d)", draws, mismatches, hist[0], hist[1], hist[2])};
}

Outcome criterion5()
{
    oracle::Rng rng(55);
    double worst_ratio = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const SystemParams p{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-2, 2), rng.uniform(-5, 5)};
        const Complex z = std::polar(rng.uniform(0, 10), rng.uniform(0, kTwoPi));
        const int k = static_cast<int>(rng.uniform(0, 6));
        worst_ratio = std::max(worst_ratio, equivariance_defect(p, z, k) / (1e-12 * (1 + std::pow(std::abs(z), 5))));
    }
    int wrong = 0;
    for (int i = 0; i < 100; ++i) {
        const bool zp1 = i % 2 == 0;
        const bool zs1 = i % 4 < 2;
        const SystemParams p{zp1 ? 0.0 : rng.sign() * rng.uniform(1e-3, 2), rng.uniform(-2, 2),
                             zs1 ? 0.0 : rng.sign() * rng.uniform(1e-3, 2), rng.uniform(-4, 4)};
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const double x = rng.uniform(-2, 2);
            const double y = rng.uniform(-2, 2);
            const Matrix2 j = oracle_jacobian(p, x, y);
            const double fd = j[0][0] + j[1][1];
            worst = std::max(worst, std::abs(fd));
            if (std::abs(divergence(p, {x, y}) - fd) > 1e-5 * (1 + std::abs(fd))) {
                ++wrong;
            }
        }
        if ((worst < 1e-6) != (zp1 && zs1) || is_hamiltonian(p) != (zp1 && zs1)) {
            ++wrong;
        }
    }
    return {worst_ratio < 1.0 && wrong == 0,
            fmt("max defect / bound %.2e over 1000 samples; %d divergence disagreements over 100 parameter draws",
                worst_ratio, wrong)};
}

Outcome criterion6()
{
    oracle::Rng rng(66);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double s1 = rng.uniform(-2, 2);
        const double s2 = rng.sign() * rng.uniform(1.05, 5);
        const double quad = oracle::integrate(
            [&](double t) { return -2.0 * (s1 - std::cos(6 * t)) / (s2 + std::sin(6 * t)); }, 0, kTwoPi);
        const InfinityReport rep = infinity_report(SystemParams{0.3, 1, s1, s2});
        const double closed = -(s2 > 0 ? 1 : -1) * 4 * std::numbers::pi * s1 / std::sqrt(s2 * s2 - 1);
        worst = std::max({worst, std::abs(rep.integral_value - quad), std::abs(closed - quad)});
    }
    return {worst < 1e-8, fmt("max |closed form - quadrature| = %.2e over 20 draws", worst)};
}

Outcome criterion7()
{
    oracle::Rng rng(77);
    int done = 0;
    int tries = 0;
    double worst = 0.0;
    while (done < 10 && tries < 100) {
        ++tries;
        const SystemParams p{rng.uniform(-1, 1), rng.sign() * rng.uniform(0.3, 2), rng.uniform(-1, 1),
                             rng.sign() * rng.uniform(1.05, 4)};
        const double r0 = rng.uniform(0.01, 0.5) * std::abs(p.p2) / (std::abs(p.s2) + 1);
        const double span = p.p2 > 0 ? kTwoPi : -kTwoPi;
        Trajectory traj;
        try {
            IntegrationOptions io;
            io.tol = 1e-12;
            io.max_step = 0.02;
            traj = integrate_polar(p, {r0, 0.0}, span, io);
        } catch (const NumericalError&) {
            continue;
        }
        const AbelCoefficients abel(p);
        double sup = 0.0;
        for (std::size_t k = 1; k < traj.size(); ++k) {
            const double th0 = traj.independent[k - 1];
            const double th1 = traj.independent[k];
            const double x0 = cherkas_forward(p, {traj.value(k - 1), th0});
            const double x1 = cherkas_forward(p, {traj.value(k), th1});
            const auto step = oracle::rk4<1>(
                [&](double th, const oracle::Vec<1>& y) { return oracle::Vec<1>{abel.rhs(y[0], th)}; }, th0, {x0},
                th1, 20);
            sup = std::max(sup, std::abs(step[0] - x1));
        }
        // The whole turn, integrated as one Abel solution from the mapped initial value.
        if (p.p2 > 0) {
            const Trajectory a = integrate_abel(p, cherkas_forward(p, {r0, 0.0}), 1e-12);
            sup = std::max(sup, std::abs(a.value(a.size() - 1) - cherkas_forward(p, {traj.value(traj.size() - 1), kTwoPi})));
        }
        worst = std::max(worst, sup);
        ++done;
    }
    return {done == 10 && worst < 1e-6, fmt("%d trajectories, sup deviation %.2e", done, worst)};
}

Outcome criterion8()
{
    struct Case {
        SystemParams params;
        int surrounded;
        bool boundary;
    };
    const Case cases[] = {{SystemParams{3.3, -1, -0.5, 1.2}, 1, false},
                          {at_sigma_a(-1, -0.5, 1.2, true), 7, true},
                          {SystemParams{3.2, -1, -0.5, 1.2}, 13, false}};
    bool ok = true;
    std::string detail;
    for (const Case& c : cases) {
        const ScanResult scan = scan_cycles(c.params, default_scan_radius(c.params), 200);
        const RegionReport reg = region_report(c.params);
        bool this_ok = scan.cycles.size() == 1 && !scan.degenerate;
        double mult = 0.0;
        int surr = -1;
        if (!scan.cycles.empty()) {
            mult = scan.cycles[0].multiplier;
            surr = scan.cycles[0].surrounded_equilibria;
            this_ok = this_ok && surr == c.surrounded;
            const bool hyperbolic = std::abs(mult - 1.0) > 1e-4;
            this_ok = this_ok && (hyperbolic || (c.boundary && reg.certificate == Certificate::AtMostOneLC));
        }
        if (c.boundary) {
            this_ok = this_ok && reg.certificate == Certificate::AtMostOneLC && reg.equilibria_count == 7;
        }
        ok = ok && this_ok;
        detail += fmt("p1=%.6f: %zu cycle(s), surrounds %d, multiplier %.3e; ", c.params.p1, scan.cycles.size(), surr,
                      mult);
    }
    return {ok, detail};
}

Outcome criterion9()
{
    oracle::Rng rng(99);
    int certified = 0;
    int violations = 0;
    int gaps = 0;
    int found = 0;
    while (certified < 60) {
        const SystemParams p = SystemParams::make(rng.uniform(-4, 4), rng.sign() * rng.uniform(0.1, 3),
                                                  rng.uniform(-2, 2), rng.sign() * rng.uniform(1.0500001, 5.0));
        if (region_report(p).certificate != Certificate::AtMostOneLC) {
            continue;
        }
        ++certified;
        const ScanResult scan = scan_cycles(p, default_scan_radius(p), 200);
        gaps += scan.gaps.empty() ? 0 : 1;
        found += scan.cycles.empty() ? 0 : 1;
        if (scan.cycles.size() >= 2) {
            ++violations;
            std::printf("  %zu cycles at (%.17g, %.17g, %.17g, %.17g)\n", scan.cycles.size(), p.p1, p.p2, p.s1, p.s2);
        }
    }
    return {violations == 0, fmt("%d certified draws, %d with a cycle, %d with scan gaps, %d with two or more cycles",
                                 certified, found, gaps, violations)};
}

// For p1 = s1 = 0 the field is 2i dH/dzbar with H = r^2 (p2 / 4 + r c(theta) / 6), r = |z|^2.
// Non-origin equilibria are its critical points on sin 6 theta = +-1, at level p2^3 / (12 c^2);
// the origin's period annulus ends at the lower of those levels. Returns its radius on theta = 0.
double annulus_radius(const SystemParams& p)
{
    if (p.p2 * p.s2 > 0) {
        return std::numeric_limits<double>::infinity();
    }
    const double c = std::abs(p.s2) + 1;
    const double level = std::abs(p.p2 * p.p2 * p.p2) / (12 * c * c);
    const auto h = [&](double r) { return std::abs(r * r * (p.p2 / 4 + r * p.s2 / 6)); };
    double lo = 0.0;
    double hi = -p.p2 / p.s2;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) < level ? lo : hi) = mid;
    }
    return lo;
}

Outcome criterion10()
{
    oracle::Rng rng(1010);
    double worst = 0.0;
    int samples = 0;
    for (int d = 0; d < 4; ++d) {
        // Two draws with the origin the only equilibrium, two with the saddles present.
        const double sp = rng.sign();
        const double p2 = sp * rng.uniform(0.5, 2);
        const double s2 = (d < 2 ? sp : -sp) * rng.uniform(1.2, 4);
        const SystemParams p{0.0, p2, 0.0, s2};
        const double bound = annulus_radius(p);
        for (int i = 0; i < 10; ++i) {
            const double rho = std::isinf(bound) ? 0.05 * std::pow(100.0, i / 9.0) : bound * (0.02 + 0.93 * i / 9.0);
            const ReturnMapSample s = return_map(p, rho);
            worst = std::max(worst, std::abs(s.rho_out - rho));
            ++samples;
        }
    }
    return {worst < 1e-8,
            fmt("%d radii over 4 parameter draws (inside the period annulus when saddles exist), max |Pi(rho) - rho| = %.2e",
                samples, worst)};
}

}  // namespace

int main()
{
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"sigma thresholds", criterion1},
        {"saddle-node location and eigenvector", criterion2},
        {"quintic on line R", criterion3},
        {"equilibrium count law", criterion4},
        {"equivariance and divergence", criterion5},
        {"infinity stability integral", criterion6},
        {"Abel conjugacy", criterion7},
        {"limit-cycle counts", criterion8},
        {"certificate soundness", criterion9},
        {"center return map", criterion10},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d (%s): %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of 10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
