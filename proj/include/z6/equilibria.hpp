#pragma once

#include <array>
#include <vector>

#include "z6/core_model.hpp"

namespace z6 {

/// Relative zero tolerance for the quadratic form: |Q| <= kQZeroTol * (p1^2 + p2^2).
inline constexpr double kQZeroTol = 1e-9;

enum class Sign { Negative, Zero, Positive };

/// Q(p1, p2) = p1^2 + p2^2 - (p1 s2 - p2 s1)^2 together with the quantities built on it.
struct QuadraticFormValue {
    double value = 0.0;
    Sign sign = Sign::Zero;
    /// sqrt(Q) when Q is positive, 0 otherwise.
    double u = 0.0;
};

QuadraticFormValue quadratic_form(const SystemParams& params, double zero_tol = kQZeroTol);

enum class EquilibriumKind { Focus, Node, Saddle, SaddleNode, Center, Degenerate };

/// Which root of the tan(3 theta) quadratic an equilibrium comes from. Plus is the pair whose
/// eigenvalue product is -12 (p1^2 + p2^2) u / (u - p1 s1 - p2 s2).
enum class Branch { Origin, Plus, Minus, Double };

struct Equilibrium {
    double r = 0.0;
    double theta = 0.0;
    double x = 0.0;
    double y = 0.0;
    /// Eigenvalues of the polar Jacobian; {0, 0} for the origin, whose linear part vanishes.
    std::array<Complex, 2> eigenvalues{};
    EquilibriumKind kind = EquilibriumKind::Degenerate;
    int index_hint = 0;
    Branch branch = Branch::Origin;

    bool is_origin() const { return branch == Branch::Origin; }
};

struct EquilibriaOptions {
    double q_zero_tol = kQZeroTol;
};

/// All equilibria, the origin first, then the others sorted by theta, each classified.
/// Requires p2 != 0 and |s2| > 1.
std::vector<Equilibrium> solve_equilibria(const SystemParams& params,
                                          const EquilibriaOptions& options = {});

/// Fills eigenvalues, kind and index_hint of a non-origin equilibrium.
Equilibrium classify_equilibrium(const SystemParams& params, const Equilibrium& e,
                                 const EquilibriaOptions& options = {});

/// Number of equilibria (origin included) implied by sign Q and sign s2 p2: 1, 7 or 13.
int equilibrium_count(const SystemParams& params, const EquilibriaOptions& options = {});

/// Largest |polar field| over a set of equilibria, scaled by 1 / (1 + r^2).
double equilibrium_residual(const SystemParams& params, const Equilibrium& e);

/// Independent zero search of the polar field on an (r, theta) grid with Newton polishing.
std::vector<PolarState> brute_force_equilibria(const SystemParams& params, int grid_n);

const char* to_string(EquilibriumKind kind);
const char* to_string(Sign sign);

}  // namespace z6
