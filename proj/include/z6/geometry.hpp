#pragma once

// Straight segments, the scalar product of the field with their normals, and the polygonal
// no-contact curves joining the origin to a saddle-node.

#include <limits>
#include <string>
#include <vector>

#include "z6/core_model.hpp"
#include "z6/equilibria.hpp"
#include "z6/polynomial.hpp"

namespace z6 {

/// The points base + t direction for t in [t_min, t_max], with a unit normal.
struct Segment {
    CartesianState base;
    CartesianState direction{1.0, 0.0};
    CartesianState normal{0.0, 1.0};
    double t_min = 0.0;
    double t_max = 1.0;

    /// From a to b with t in [0, 1]; the normal is the left one along a -> b.
    static Segment between(const CartesianState& a, const CartesianState& b);
    /// Normal is the left unit normal of direction, or the right one when left_normal is false.
    static Segment along(const CartesianState& base, const CartesianState& direction, double t_min,
                         double t_max, bool left_normal = true);

    CartesianState point(double t) const { return {base.x + t * direction.x, base.y + t * direction.y}; }
    CartesianState start() const { return point(t_min); }
    CartesianState end() const { return point(t_max); }
    bool empty() const;
};

/// <(P, Q)(base + t direction), normal> as a polynomial in t. The normal need not be unit.
RealPoly scalar_product_poly(const SystemParams& params, const CartesianState& base,
                             const CartesianState& direction, const CartesianState& normal);
RealPoly scalar_product_poly(const SystemParams& params, const Segment& seg);

enum class TransversalSign { AlwaysPositive, AlwaysNegative, Mixed };

struct TransversalityReport {
    Segment segment;
    RealPoly poly;
    TransversalSign sign = TransversalSign::AlwaysPositive;
    /// Sign-changing roots strictly inside the domain.
    std::vector<double> crossing_roots;
    /// Roots without a sign change (double roots, such as an equilibrium on a tangent line),
    /// and roots at the domain ends.
    std::vector<double> touching_roots;
    /// min |scalar product| over the closed domain; 0 when Mixed, +inf when the domain is empty.
    double margin = std::numeric_limits<double>::infinity();
    bool empty_domain = false;

    bool uniform() const { return sign != TransversalSign::Mixed; }
};

TransversalityReport verify_transversality(const SystemParams& params, const Segment& seg);

/// The saddle-node of the first sextant together with the eigenvector of its nonzero eigenvalue,
/// oriented toward the origin.
struct SaddleNodeData {
    Equilibrium equilibrium;
    CartesianState eigenvector;
    double eigenvalue = 0.0;
};

/// Requires the seven-equilibria configuration (Q = 0 within tolerance).
SaddleNodeData saddle_node_data(const SystemParams& params, const EquilibriaOptions& options = {});

struct Polygonal {
    std::vector<Segment> segments;
    std::vector<TransversalityReport> reports;
    SaddleNodeData saddle_node;
    /// "example", "two-segment" or "three-segment".
    std::string construction;
};

/// The explicit polygonal of the worked example: the diagonal up to 2 sqrt(1/2.8), a segment of
/// slope 1.5 up to the line R, then R down to the saddle-node. The saddle-node is taken at
/// p1 = sigma_a+ of (p2, s1, s2); transversality is evaluated at params.
Polygonal example_polygonal(const SystemParams& params);

/// The polygonal from the origin to the first-sextant saddle-node. Handles the worked-example
/// family (p2, s1, s2) = (-1, -0.5, 1.2) and the case 0 < s1 <= 1, s2 > 1, p2 < 0, each with p1
/// at sigma_a+. Throws ConstructionFailure otherwise or when a segment is not certified with
/// the flow crossing every segment against its left normal.
Polygonal build_polygonal(const SystemParams& params);

/// The line R of the worked example: normal (0.5114, -0.8594) and slope 0.5114 / 0.8594.
inline constexpr double kExampleNormalX = 0.5114;
inline constexpr double kExampleNormalY = -0.8594;
inline constexpr double kExampleSecondSlope = 1.5;
inline constexpr double kExampleDiagonalSq = 1.0 / 2.8;

const char* to_string(TransversalSign s);

}  // namespace z6
