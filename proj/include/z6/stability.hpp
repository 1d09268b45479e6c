#pragma once

#include <optional>

#include "z6/core_model.hpp"

namespace z6 {

enum class OriginStability { Repellor, Attractor, CenterCandidate };

struct OriginReport {
    bool monodromic = false;
    /// exp(4 pi p1 / p2) - 1.
    double v1 = 0.0;
    /// 4 pi s1, present only when v1 == 0.
    std::optional<double> v2;
    OriginStability stability = OriginStability::CenterCandidate;
};

enum class InfinityStability { Repellor, Attractor, Undefined };

struct InfinityReport {
    bool regular = false;
    InfinityStability stability = InfinityStability::Undefined;
    /// Integral over theta in [0, 2 pi], -sgn(s2) 4 pi s1 / sqrt(s2^2 - 1); zero when not regular.
    double integral_value = 0.0;
    /// Regular but s1 = 0: the first-order stability integral vanishes.
    bool neutral = false;
};

/// Stability of the origin in original time. Requires p2 != 0.
OriginReport origin_report(const SystemParams& params);

/// Stability of the circle at infinity of the Poincare compactification.
InfinityReport infinity_report(const SystemParams& params);

/// Integrand of the infinity stability integral, -2 (s1 - cos 6t) / (s2 + sin 6t).
double infinity_integrand(const SystemParams& params, double theta);

const char* to_string(OriginStability s);
const char* to_string(InfinityStability s);

}  // namespace z6
