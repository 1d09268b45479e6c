#include "z6/stability.hpp"

#include <cmath>
#include <numbers>

#include "z6/errors.hpp"

namespace z6 {

OriginReport origin_report(const SystemParams& params)
{
    if (!params.rotation_defined()) {
        throw RegimeError("origin_report requires p2 != 0 (the origin is not monodromic otherwise)");
    }
    OriginReport out;
    out.monodromic = true;
    out.v1 = std::expm1(4.0 * std::numbers::pi * params.p1 / params.p2);
    if (out.v1 == 0.0) {
        out.v2 = 4.0 * std::numbers::pi * params.s1;
    }
    // dr/ds = 2 p1 r + O(r^2); the sign of p2 only orients the rotation.
    if (params.p1 > 0.0) {
        out.stability = OriginStability::Repellor;
    } else if (params.p1 < 0.0) {
        out.stability = OriginStability::Attractor;
    } else if (params.s1 > 0.0) {
        out.stability = OriginStability::Repellor;
    } else if (params.s1 < 0.0) {
        out.stability = OriginStability::Attractor;
    } else {
        out.stability = OriginStability::CenterCandidate;
    }
    return out;
}

InfinityReport infinity_report(const SystemParams& params)
{
    InfinityReport out;
    out.regular = params.infinity_regular();
    if (!out.regular) {
        return out;
    }
    const double sgn = params.s2 > 0.0 ? 1.0 : -1.0;
    out.integral_value =
        -sgn * 4.0 * std::numbers::pi * params.s1 / std::sqrt(params.s2 * params.s2 - 1.0);
    if (params.s1 == 0.0) {
        out.neutral = true;
        out.stability = InfinityStability::Undefined;
    } else {
        // Averaged over one turn in time, d(log R)/ds = -2 s1 times a positive factor for
        // either orientation, so infinity attracts iff s1 > 0 whatever the sign of s2.
        out.stability = params.s1 > 0.0 ? InfinityStability::Attractor : InfinityStability::Repellor;
    }
    return out;
}

double infinity_integrand(const SystemParams& params, double theta)
{
    const double phi = 6.0 * theta;
    return -2.0 * (params.s1 - std::cos(phi)) / (params.s2 + std::sin(phi));
}

const char* to_string(OriginStability s)
{
    switch (s) {
    case OriginStability::Repellor:
        return "Repellor";
    case OriginStability::Attractor:
        return "Attractor";
    case OriginStability::CenterCandidate:
        return "CenterCandidate";
    }
    return "Unknown";
}

const char* to_string(InfinityStability s)
{
    switch (s) {
    case InfinityStability::Repellor:
        return "Repellor";
    case InfinityStability::Attractor:
        return "Attractor";
    case InfinityStability::Undefined:
        return "Undefined";
    }
    return "Unknown";
}

}  // namespace z6
