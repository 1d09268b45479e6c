#include "z6/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "z6/abel.hpp"
#include "z6/errors.hpp"

namespace z6 {

namespace {

CartesianState left_unit_normal(const CartesianState& d)
{
    const double n = std::hypot(d.x, d.y);
    return {-d.y / n, d.x / n};
}

bool family_member(const SystemParams& params, double p2, double s1, double s2)
{
    constexpr double tol = 1e-12;
    return std::abs(params.p2 - p2) <= tol && std::abs(params.s1 - s1) <= tol && std::abs(params.s2 - s2) <= tol;
}

bool near_sigma_a_plus(const SystemParams& params)
{
    const double sp = sigma_thresholds(params).sigma_a_plus;
    return std::abs(params.p1 - sp) <= 1e-4 * std::max(1.0, std::abs(sp));
}

std::string describe(const TransversalityReport& r, std::size_t index)
{
    std::ostringstream os;
    os << "segment " << index << " from (" << r.segment.start().x << ", " << r.segment.start().y << ") to ("
       << r.segment.end().x << ", " << r.segment.end().y << "): " << to_string(r.sign);
    if (!r.crossing_roots.empty()) {
        os << ", crossing at t =";
        for (double t : r.crossing_roots) {
            os << ' ' << t;
        }
    }
    return os.str();
}

void certify(const SystemParams& params, Polygonal& poly)
{
    std::string failures;
    for (std::size_t i = 0; i < poly.segments.size(); ++i) {
        TransversalityReport rep = verify_transversality(params, poly.segments[i]);
        if (rep.sign != TransversalSign::AlwaysNegative) {
            failures += (failures.empty() ? "" : "; ") + describe(rep, i);
        }
        poly.reports.push_back(std::move(rep));
    }
    if (!failures.empty()) {
        throw ConstructionFailure("polygonal not certified: " + failures);
    }
}

}  // namespace

Segment Segment::between(const CartesianState& a, const CartesianState& b)
{
    const CartesianState d{b.x - a.x, b.y - a.y};
    Segment s;
    s.base = a;
    s.direction = d;
    s.t_min = 0.0;
    s.t_max = 1.0;
    s.normal = (d.x == 0.0 && d.y == 0.0) ? CartesianState{0.0, 1.0} : left_unit_normal(d);
    return s;
}

Segment Segment::along(const CartesianState& base, const CartesianState& direction, double t_min, double t_max,
                       bool left_normal)
{
    Segment s;
    s.base = base;
    s.direction = direction;
    s.t_min = t_min;
    s.t_max = t_max;
    s.normal = left_unit_normal(direction);
    if (!left_normal) {
        s.normal = {-s.normal.x, -s.normal.y};
    }
    return s;
}

bool Segment::empty() const
{
    return !(t_max > t_min) || (direction.x == 0.0 && direction.y == 0.0);
}

RealPoly scalar_product_poly(const SystemParams& params, const CartesianState& base,
                             const CartesianState& direction, const CartesianState& normal)
{
    const Complex z0(base.x, base.y);
    const Complex dz(direction.x, direction.y);
    const ComplexPoly z{z0, dz};
    const ComplexPoly zb{std::conj(z0), std::conj(dz)};
    const Complex p(params.p1, params.p2);
    const Complex q(params.s1, params.s2);
    const ComplexPoly zzb = z * zb;
    const ComplexPoly zb2 = zb * zb;
    const ComplexPoly f = p * (z * zzb) + q * (z * z * zzb * zb) - zb2 * zb2 * zb;
    // <(P, Q), n> = Re(f conj(n)).
    return real_part(Complex(normal.x, -normal.y) * f);
}

RealPoly scalar_product_poly(const SystemParams& params, const Segment& seg)
{
    return scalar_product_poly(params, seg.base, seg.direction, seg.normal);
}

TransversalityReport verify_transversality(const SystemParams& params, const Segment& seg)
{
    TransversalityReport rep;
    rep.segment = seg;
    rep.poly = scalar_product_poly(params, seg);
    if (seg.empty()) {
        rep.empty_domain = true;
        return rep;
    }
    const RealPoly q = trimmed(rep.poly);
    if (q.is_zero()) {
        rep.sign = TransversalSign::Mixed;
        rep.margin = 0.0;
        return rep;
    }

    const double lo = seg.t_min;
    const double hi = seg.t_max;
    const double end_tol = kRootClusterTol * std::max(1.0, hi - lo);
    const double bound = std::max({root_bound(q), std::abs(lo), std::abs(hi)}) + 1.0;
    for (const RealRoot& r : real_roots(q, -bound, bound)) {
        if (r.value < lo - end_tol || r.value > hi + end_tol) {
            continue;
        }
        const bool interior = r.value > lo + end_tol && r.value < hi - end_tol;
        if (interior && r.crossing) {
            rep.crossing_roots.push_back(r.value);
        } else {
            rep.touching_roots.push_back(r.value);
        }
    }

    std::vector<double> probes{lo, hi};
    for (const RealRoot& c : real_roots(q.derivative(), lo, hi, 0.0)) {
        probes.push_back(c.value);
    }
    std::sort(probes.begin(), probes.end());
    rep.margin = std::numeric_limits<double>::infinity();
    for (double t : probes) {
        rep.margin = std::min(rep.margin, std::abs(q(t)));
    }

    if (!rep.crossing_roots.empty()) {
        rep.sign = TransversalSign::Mixed;
        rep.margin = 0.0;
        return rep;
    }
    // Without an interior sign change the sign is read off where |p| is largest.
    double best = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const double t = probes[i];
        const double m = i + 1 < probes.size() ? 0.5 * (t + probes[i + 1]) : t;
        for (double s : {t, m}) {
            const double v = q(s);
            if (std::abs(v) > std::abs(best)) {
                best = v;
            }
        }
    }
    rep.sign = best < 0.0 ? TransversalSign::AlwaysNegative : TransversalSign::AlwaysPositive;
    return rep;
}

SaddleNodeData saddle_node_data(const SystemParams& params, const EquilibriaOptions& options)
{
    for (const Equilibrium& e : solve_equilibria(params, options)) {
        if (e.kind != EquilibriumKind::SaddleNode || e.theta >= kSextant) {
            continue;
        }
        const Matrix2 j = cartesian_jacobian(params, CartesianState{e.x, e.y});
        const double lambda = j[0][0] + j[1][1];
        CartesianState v{j[0][1], lambda - j[0][0]};
        const CartesianState w{lambda - j[1][1], j[1][0]};
        if (std::hypot(w.x, w.y) > std::hypot(v.x, v.y)) {
            v = w;
        }
        const double n = std::hypot(v.x, v.y);
        if (n == 0.0) {
            throw DegenerateError("saddle-node with a vanishing linear part");
        }
        v = {v.x / n, v.y / n};
        if (v.x * e.x + v.y * e.y > 0.0) {
            v = {-v.x, -v.y};
        }
        return {e, v, lambda};
    }
    throw DegenerateError("no saddle-node: the parameters are not on Q = 0");
}

Polygonal example_polygonal(const SystemParams& params)
{
    Polygonal out;
    out.construction = "example";
    out.saddle_node = saddle_node_data(at_sigma_a(params.p2, params.s1, params.s2, true));
    const CartesianState z0{out.saddle_node.equilibrium.x, out.saddle_node.equilibrium.y};
    const double a = 2.0 * std::sqrt(kExampleDiagonalSq);
    const double m = -kExampleNormalX / kExampleNormalY;
    const double k = kExampleSecondSlope;
    // (a, a) + s (1, k) meets z0 + u (1, m).
    if (k == m) {
        throw ConstructionFailure("second segment is parallel to R");
    }
    const double s = (z0.y + m * (a - z0.x) - a) / (k - m);
    if (!(s > 0.0)) {
        throw ConstructionFailure("second segment does not reach R");
    }
    const CartesianState p0{0.0, 0.0};
    const CartesianState p1{a, a};
    const CartesianState p2{a + s, a + k * s};
    out.segments = {Segment::between(p0, p1), Segment::between(p1, p2), Segment::between(p2, z0)};
    for (const Segment& seg : out.segments) {
        out.reports.push_back(verify_transversality(params, seg));
    }
    return out;
}

Polygonal build_polygonal(const SystemParams& params)
{
    if (family_member(params, -1.0, -0.5, 1.2) && near_sigma_a_plus(params)) {
        Polygonal out = example_polygonal(params);
        out.reports.clear();
        certify(params, out);
        return out;
    }
    if (!(params.s1 > 0.0 && params.s1 <= 1.0 && params.s2 > 1.0 && params.p2 < 0.0)) {
        throw ConstructionFailure("construction requires 0 < s1 <= 1, s2 > 1 and p2 < 0");
    }
    if (!near_sigma_a_plus(params)) {
        throw ConstructionFailure("construction requires p1 = sigma_a+");
    }

    Polygonal out;
    out.saddle_node = saddle_node_data(at_sigma_a(params.p2, params.s1, params.s2, true));
    const Equilibrium& e = out.saddle_node.equilibrium;
    const double pi = std::numbers::pi;
    if (!(e.theta > pi / 4.0 && e.theta < pi / 3.0)) {
        throw ConstructionFailure("saddle-node angle " + std::to_string(e.theta) + " outside (pi/4, pi/3)");
    }
    const CartesianState z0{e.x, e.y};
    // z0 lies above the diagonal; follow the tangent line toward it.
    CartesianState v = out.saddle_node.eigenvector;
    if (v.y - v.x > 0.0) {
        v = {-v.x, -v.y};
    }
    const double r1 = -params.p2 / (params.s2 - 1.0);
    const double ray_len = std::sqrt(r1);
    const CartesianState diag{std::sqrt(0.5), std::sqrt(0.5)};

    // Transversal range of the tangent line: up to its first sign change after the double root
    // at the saddle-node. The normal is the left one along the traversal toward z0.
    const RealPoly line = scalar_product_poly(params, z0, v, left_unit_normal({-v.x, -v.y}));
    double t0 = std::numeric_limits<double>::infinity();
    for (const RealRoot& r : real_roots(line)) {
        if (r.crossing && r.value > kRootClusterTol) {
            t0 = r.value;
            break;
        }
    }

    // z0 + t v = s diag.
    const double det = v.x * (-diag.y) - v.y * (-diag.x);
    double t_hit = -1.0;
    double s_hit = -1.0;
    if (det != 0.0) {
        t_hit = (-z0.x * (-diag.y) + z0.y * (-diag.x)) / det;
        s_hit = (v.x * (-z0.y) - v.y * (-z0.x)) / det;
    }
    const CartesianState origin{0.0, 0.0};
    if (t_hit > 0.0 && t_hit < t0 && s_hit > 0.0 && s_hit < ray_len) {
        const CartesianState p{s_hit * diag.x, s_hit * diag.y};
        out.construction = "two-segment";
        out.segments = {Segment::between(origin, p), Segment::between(p, z0)};
    } else {
        if (!std::isfinite(t0)) {
            throw ConstructionFailure("tangent line stays transversal but misses the ray theta = pi/4");
        }
        const CartesianState q1{ray_len * diag.x, ray_len * diag.y};
        const CartesianState q2{z0.x + t0 * v.x, z0.y + t0 * v.y};
        out.construction = "three-segment";
        out.segments = {Segment::between(origin, q1), Segment::between(q1, q2), Segment::between(q2, z0)};
    }
    certify(params, out);
    return out;
}

const char* to_string(TransversalSign s)
{
    switch (s) {
    case TransversalSign::AlwaysPositive:
        return "AlwaysPositive";
    case TransversalSign::AlwaysNegative:
        return "AlwaysNegative";
    case TransversalSign::Mixed:
        return "Mixed";
    }
    return "Mixed";
}

}  // namespace z6
