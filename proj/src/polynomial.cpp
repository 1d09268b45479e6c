#include "z6/polynomial.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <utility>

namespace z6 {

namespace {

constexpr double kTouchingTol = 1e-12;

struct RawRoot {
    double value;
    bool crossing;
};

double polish(const RealPoly& p, double a, double b, double fa, double fb)
{
    auto f = [&](double x) { return p(x); };
    auto tol = [](double lo, double hi) { return std::abs(hi - lo) <= kRootPolishTol * std::max(1.0, std::abs(lo)); };
    std::uintmax_t iters = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    return 0.5 * (lo + hi);
}

// Distinct roots in [lo, hi] via the critical points of p, which split it into monotone pieces.
std::vector<RawRoot> isolate(const RealPoly& p, double lo, double hi)
{
    std::vector<RawRoot> out;
    const int n = p.degree();
    if (n <= 0) {
        return out;
    }
    if (n == 1) {
        const double x = -p[0] / p[1];
        if (x >= lo && x <= hi) {
            out.push_back({x, true});
        }
        return out;
    }
    // Knots with a flag marking extrema of p (sign changes of p').
    std::vector<std::pair<double, bool>> knots{{lo, false}};
    std::vector<double> critical;
    for (const RawRoot& r : isolate(p.derivative(), lo, hi)) {
        if (r.value > lo && r.value < hi) {
            knots.emplace_back(r.value, r.crossing);
            if (r.crossing) {
                critical.push_back(r.value);
            }
        }
    }
    knots.emplace_back(hi, false);

    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = knots[i].first;
        const double b = knots[i + 1].first;
        const double fa = p(a);
        const double fb = p(b);
        if (fa == 0.0) {
            // An exact zero at an extremum is an even root.
            if (out.empty() || out.back().value != a) {
                out.push_back({a, !knots[i].second});
            }
            continue;
        }
        if (fb == 0.0) {
            continue;
        }
        if ((fa < 0.0) != (fb < 0.0)) {
            out.push_back({polish(p, a, b, fa, fb), true});
        }
    }
    if (p(hi) == 0.0 && (out.empty() || out.back().value != hi)) {
        out.push_back({hi, true});
    }

    // An extremum where p vanishes to rounding is a double root that no bracket sees.
    for (double c : critical) {
        if (std::abs(p(c)) > kTouchingTol * p.magnitude(c)) {
            continue;
        }
        const bool near_crossing = std::any_of(out.begin(), out.end(), [&](const RawRoot& r) {
            return std::abs(r.value - c) <= kRootPolishTol * std::max(1.0, std::abs(c)) * 10.0;
        });
        if (!near_crossing) {
            out.push_back({c, false});
        }
    }
    std::sort(out.begin(), out.end(), [](const RawRoot& a, const RawRoot& b) { return a.value < b.value; });
    return out;
}

}  // namespace

RealPoly trimmed(const RealPoly& p, double rel)
{
    std::vector<double> c = p.coefficients();
    double big = 0.0;
    for (double v : c) {
        big = std::max(big, std::abs(v));
    }
    while (!c.empty() && std::abs(c.back()) <= rel * big) {
        c.pop_back();
    }
    return RealPoly(std::move(c));
}

double root_bound(const RealPoly& p)
{
    const RealPoly q = trimmed(p);
    if (q.degree() <= 0) {
        return 0.0;
    }
    const double lead = std::abs(q[q.degree()]);
    double m = 0.0;
    for (int i = 0; i < q.degree(); ++i) {
        m = std::max(m, std::abs(q[i]) / lead);
    }
    return 1.0 + m;
}

std::vector<RealRoot> real_roots(const RealPoly& p, double lo, double hi, double cluster_tol)
{
    std::vector<RealRoot> out;
    const RealPoly q = trimmed(p);
    if (q.degree() <= 0 || !(hi >= lo)) {
        return out;
    }
    for (const RawRoot& r : isolate(q, lo, hi)) {
        const int mult = r.crossing ? 1 : 2;
        if (!out.empty() && r.value - out.back().value <= cluster_tol) {
            RealRoot& last = out.back();
            // Weighted centre, so a split double root reports its midpoint.
            last.value = (last.value * last.multiplicity + r.value * mult) / (last.multiplicity + mult);
            last.multiplicity += mult;
            last.crossing = (last.multiplicity % 2) == 1;
            continue;
        }
        out.push_back({r.value, mult, r.crossing});
    }
    return out;
}

std::vector<RealRoot> real_roots(const RealPoly& p, double cluster_tol)
{
    const double b = root_bound(p);
    return real_roots(p, -b, b, cluster_tol);
}

std::vector<RealPoly> sturm_sequence(const RealPoly& p)
{
    std::vector<RealPoly> seq;
    const RealPoly p0 = trimmed(p);
    if (p0.is_zero()) {
        return seq;
    }
    seq.push_back(p0);
    RealPoly p1 = trimmed(p0.derivative());
    if (p1.is_zero()) {
        return seq;
    }
    seq.push_back(p1);
    while (true) {
        const RealPoly& u = seq[seq.size() - 2];
        const RealPoly& v = seq.back();
        std::vector<double> r = u.coefficients();
        const int dv = v.degree();
        const double lead = v[dv];
        for (int k = u.degree() - dv; k >= 0; --k) {
            const double factor = r[k + dv] / lead;
            for (int j = 0; j <= dv; ++j) {
                r[k + j] -= factor * v[j];
            }
        }
        r.resize(dv);
        double scale = 0.0;
        for (double c : u.coefficients()) {
            scale = std::max(scale, std::abs(c));
        }
        while (!r.empty() && std::abs(r.back()) <= 1e-12 * scale) {
            r.pop_back();
        }
        if (r.empty()) {
            break;
        }
        double norm = 0.0;
        for (double c : r) {
            norm = std::max(norm, std::abs(c));
        }
        for (double& c : r) {
            c = -c / norm;
        }
        seq.emplace_back(std::move(r));
        if (seq.back().degree() == 0) {
            break;
        }
    }
    return seq;
}

int sturm_count(const RealPoly& p, double lo, double hi)
{
    const std::vector<RealPoly> seq = sturm_sequence(p);
    auto variations = [&](double x) {
        int changes = 0;
        double last = 0.0;
        for (const RealPoly& s : seq) {
            const double v = s(x);
            if (v == 0.0) {
                continue;
            }
            if (last != 0.0 && (v < 0.0) != (last < 0.0)) {
                ++changes;
            }
            last = v;
        }
        return changes;
    };
    return variations(lo) - variations(hi);
}

}  // namespace z6
