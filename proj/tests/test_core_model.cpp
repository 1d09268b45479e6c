#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "z6/core_model.hpp"
#include "z6/errors.hpp"

using namespace z6;

namespace {

oracle::P as_oracle(const SystemParams& p)
{
    return {p.p1, p.p2, p.s1, p.s2};
}

SystemParams random_params(oracle::Rng& rng)
{
    return SystemParams::make(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-2, 2), rng.uniform(-5, 5));
}

}  // namespace

TEST_CASE("parameters must be finite")
{
    CHECK_THROWS_AS(SystemParams::make(std::nan(""), 1, 0, 2), InvalidInput);
    CHECK_THROWS_AS(SystemParams::make(0, INFINITY, 0, 2), InvalidInput);
    CHECK_NOTHROW(SystemParams::make(0, 1, 0, 2));
}

TEST_CASE("regime predicates")
{
    CHECK(SystemParams{0, 1, 0, 2}.rotation_defined());
    CHECK_FALSE(SystemParams{0, 0, 0, 2}.rotation_defined());
    CHECK(SystemParams{0, 1, 0, -1.5}.infinity_regular());
    CHECK_FALSE(SystemParams{0, 1, 0, 1.0}.infinity_regular());
    CHECK_FALSE(SystemParams{0, 1, 0, -1.0}.infinity_regular());
    CHECK_THROWS_AS(SystemParams({0, 0, 0, 2}).require_regular_regime("x"), RegimeError);
    CHECK_THROWS_AS(SystemParams({0, 1, 0, 0.5}).require_regular_regime("x"), RegimeError);
    CHECK(SystemParams{0, 1, 0, 2}.boundary_warnings().empty());
    CHECK(SystemParams{0, 1e-10, 0, 2}.boundary_warnings().size() == 1);
    CHECK(SystemParams{0, 1, 0, 1.0 + 1e-10}.boundary_warnings().size() == 1);
}

TEST_CASE("angles and sextants")
{
    CHECK(normalize_angle(-0.5) == doctest::Approx(kTwoPi - 0.5));
    CHECK(normalize_angle(7.0) == doctest::Approx(7.0 - kTwoPi));
    CHECK(normalize_angle(0.0) == 0.0);
    CHECK(sextant_index(0.1) == 0);
    CHECK(sextant_index(kSextant + 1e-9) == 1);
    CHECK(sextant_index(-0.1) == 5);
    const PolarState ps = to_polar({3.0, -4.0});
    CHECK(ps.r == doctest::Approx(25.0));
    const CartesianState back = to_cartesian(ps);
    CHECK(back.x == doctest::Approx(3.0));
    CHECK(back.y == doctest::Approx(-4.0));
}

TEST_CASE("complex field: hand-evaluated points")
{
    const SystemParams p{0, 1, 0, 1};
    const Complex f = eval_complex_field(p, 1.0);
    CHECK(f.real() == doctest::Approx(-1.0));
    CHECK(f.imag() == doctest::Approx(2.0));
    CHECK(eval_complex_field(SystemParams{1.3, -2, 0.4, 3}, 0.0) == Complex(0.0, 0.0));
}

TEST_CASE("complex field matches the test-side definition")
{
    oracle::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const SystemParams p = random_params(rng);
        const Complex z(rng.uniform(-3, 3), rng.uniform(-3, 3));
        const Complex a = eval_complex_field(p, z);
        const Complex b = oracle::field(as_oracle(p), z);
        CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)));
    }
}

TEST_CASE("cartesian field agrees with the complex field")
{
    oracle::Rng rng(12);
    CHECK(eval_cartesian_field(SystemParams{1, 2, 3, 4}, {0, 0}).dx == 0.0);
    for (int i = 0; i < 500; ++i) {
        const SystemParams p = random_params(rng);
        const CartesianState s{rng.uniform(-4, 4), rng.uniform(-4, 4)};
        const CartesianRates c = eval_cartesian_field(p, s);
        const Complex f = eval_complex_field(p, Complex(s.x, s.y));
        const double scale = 1e-12 * std::max(1.0, std::abs(f));
        CHECK(std::abs(c.dx - f.real()) <= scale * 10);
        CHECK(std::abs(c.dy - f.imag()) <= scale * 10);
    }
}

TEST_CASE("angular rate has lowest-order term p2 (x^2 + y^2)^2")
{
    oracle::Rng rng(13);
    for (int i = 0; i < 20; ++i) {
        const SystemParams p = random_params(rng);
        const double th = rng.uniform(0, kTwoPi);
        const double rho = 1e-4;
        const CartesianState s{rho * std::cos(th), rho * std::sin(th)};
        const CartesianRates f = eval_cartesian_field(p, s);
        const double rt = s.x * f.dy - s.y * f.dx;
        const double lead = p.p2 * std::pow(rho, 4);
        CHECK(std::abs(rt - lead) <= 1e-6 * std::abs(lead) + 1e-30);
    }
}

TEST_CASE("polar field")
{
    const SystemParams p{0.7, -1.3, 0.2, 2.5};
    const PolarRates o = eval_polar_field(p, {0.0, 1.1});
    CHECK(o.dr == 0.0);
    CHECK(o.dtheta == doctest::Approx(p.p2));

    // The saddle-node of the worked example lies on the curve dtheta/ds = 0.
    const PolarRates sn = eval_polar_field(SystemParams{3.2515054233904714, -1, -0.5, 1.2}, {4.098, -0.2121});
    CHECK(std::abs(sn.dtheta) < 5e-3);

    oracle::Rng rng(14);
    for (int i = 0; i < 500; ++i) {
        const SystemParams q = random_params(rng);
        const PolarState s{rng.uniform(0.01, 10), rng.uniform(0, kTwoPi)};
        const PolarRates a = eval_polar_field(q, s);
        const auto b = oracle::polar_rates(as_oracle(q), s.r, s.theta);
        CHECK(std::abs(a.dr - b[0]) <= 1e-10 * (1.0 + std::abs(b[0])) * 10);
        CHECK(std::abs(a.dtheta - b[1]) <= 1e-10 * (1.0 + std::abs(b[1])));

        // Cartesian rates are r times the rescaled polar rates.
        const CartesianState c = to_cartesian(s);
        const CartesianRates f = eval_cartesian_field(q, c);
        const double dr_dt = 2.0 * (c.x * f.dx + c.y * f.dy);
        const double dth_dt = (c.x * f.dy - c.y * f.dx) / s.r;
        CHECK(std::abs(dr_dt - s.r * a.dr) <= 1e-10 * (1.0 + std::abs(dr_dt)) * 10);
        CHECK(std::abs(dth_dt - s.r * a.dtheta) <= 1e-10 * (1.0 + std::abs(dth_dt)) * 10);
    }
}

TEST_CASE("jacobians against finite differences")
{
    oracle::Rng rng(15);
    for (int i = 0; i < 100; ++i) {
        const SystemParams p = random_params(rng);
        const CartesianState s{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Matrix2 j = cartesian_jacobian(p, s);
        const double h = 1e-6;
        auto fx = [&](double d) { return eval_cartesian_field(p, {s.x + d, s.y}); };
        auto fy = [&](double d) { return eval_cartesian_field(p, {s.x, s.y + d}); };
        const double scale = 1e-5 * (1.0 + std::abs(j[0][0]) + std::abs(j[1][1]) + std::abs(j[0][1]) + std::abs(j[1][0]));
        CHECK(std::abs(j[0][0] - (fx(h).dx - fx(-h).dx) / (2 * h)) < scale);
        CHECK(std::abs(j[1][0] - (fx(h).dy - fx(-h).dy) / (2 * h)) < scale);
        CHECK(std::abs(j[0][1] - (fy(h).dx - fy(-h).dx) / (2 * h)) < scale);
        CHECK(std::abs(j[1][1] - (fy(h).dy - fy(-h).dy) / (2 * h)) < scale);
        CHECK(divergence(p, s) == doctest::Approx(j[0][0] + j[1][1]).epsilon(1e-10));

        const PolarState ps{rng.uniform(0.1, 3), rng.uniform(0, kTwoPi)};
        const Matrix2 pj = polar_jacobian(p, ps);
        auto gr = [&](double d) { return eval_polar_field(p, {ps.r + d, ps.theta}); };
        auto gt = [&](double d) { return eval_polar_field(p, {ps.r, ps.theta + d}); };
        const double ps_scale = 1e-5 * (1.0 + std::abs(pj[0][0]) + std::abs(pj[0][1]) + std::abs(pj[1][0]) + std::abs(pj[1][1]));
        CHECK(std::abs(pj[0][0] - (gr(h).dr - gr(-h).dr) / (2 * h)) < ps_scale);
        CHECK(std::abs(pj[0][1] - (gt(h).dr - gt(-h).dr) / (2 * h)) < ps_scale);
        CHECK(std::abs(pj[1][0] - (gr(h).dtheta - gr(-h).dtheta) / (2 * h)) < ps_scale);
        CHECK(std::abs(pj[1][1] - (gt(h).dtheta - gt(-h).dtheta) / (2 * h)) < ps_scale);
    }
}

TEST_CASE("hamiltonian predicate and divergence")
{
    CHECK(is_hamiltonian(SystemParams{0, 1, 0, 2}));
    CHECK_FALSE(is_hamiltonian(SystemParams{1e-9, 1, 0, 2}));
    CHECK_FALSE(is_hamiltonian(SystemParams{0, 1, 1e-9, 2}));

    oracle::Rng rng(16);
    for (int i = 0; i < 40; ++i) {
        const bool ham = i % 2 == 0;
        const SystemParams p{ham ? 0.0 : rng.uniform(-2, 2), rng.uniform(-2, 2), ham ? 0.0 : rng.uniform(-2, 2),
                             rng.uniform(-4, 4)};
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const CartesianState s{rng.uniform(-2, 2), rng.uniform(-2, 2)};
            const double h = 1e-5;
            const double num = (eval_cartesian_field(p, {s.x + h, s.y}).dx - eval_cartesian_field(p, {s.x - h, s.y}).dx +
                                eval_cartesian_field(p, {s.x, s.y + h}).dy - eval_cartesian_field(p, {s.x, s.y - h}).dy) /
                               (2 * h);
            const double rr = s.x * s.x + s.y * s.y;
            CHECK(divergence(p, s) == doctest::Approx(4 * p.p1 * rr + 6 * p.s1 * rr * rr));
            worst = std::max(worst, std::abs(num));
        }
        CHECK((worst < 1e-6) == is_hamiltonian(p));
    }
}

TEST_CASE("equivariance defect")
{
    oracle::Rng rng(17);
    const SystemParams p = random_params(rng);
    CHECK(equivariance_defect(p, Complex(1.3, -0.2), 0) == 0.0);
    CHECK(equivariance_defect(p, Complex(1.3, -0.2), 6) == 0.0);
    double unit_max = 0.0;
    for (int k = 0; k < 6; ++k) {
        for (int i = 0; i < 100; ++i) {
            unit_max = std::max(unit_max, equivariance_defect(p, std::polar(1.0, rng.uniform(0, kTwoPi)), k));
        }
    }
    CHECK(unit_max < 1e-13);
    for (int i = 0; i < 1000; ++i) {
        const SystemParams q = random_params(rng);
        const Complex z = std::polar(rng.uniform(0, 10), rng.uniform(0, kTwoPi));
        const int k = static_cast<int>(rng.uniform(0, 6));
        CHECK(equivariance_defect(q, z, k) < 1e-12 * (1.0 + std::pow(std::abs(z), 5)) * 10);
    }
    // A rotation that is not in the group breaks the symmetry.
    const Complex z(0.8, 0.3);
    const Complex g = std::polar(1.0, 0.3);
    CHECK(std::abs(eval_complex_field(p, g * z) - g * eval_complex_field(p, z)) > 1e-3);
}
