#pragma once

#include <optional>

#include "z6/core_model.hpp"
#include "z6/equilibria.hpp"

namespace z6 {

/// Coefficients of the Abel equation dx/dtheta = A x^3 + B x^2 + C x obtained from the polar
/// system through the Cherkas map x = r / (p2 + r (s2 + sin 6 theta)).
class AbelCoefficients {
public:
    /// Throws RegimeError when p2 == 0.
    explicit AbelCoefficients(const SystemParams& params);

    double a(double theta) const;
    double b(double theta) const;
    double c() const { return 2.0 * params_.p1 / params_.p2; }
    double c(double /*theta*/) const { return c(); }

    /// B in the form whose zero set the thresholds sigma_b describe. It lacks the factor 4 on
    /// the p2 cos 6 theta term and is not the push-forward of the polar flow.
    double b_threshold_form(double theta) const;

    double rhs(double x, double theta) const;
    /// d(rhs)/dx.
    double rhs_dx(double x, double theta) const;

    const SystemParams& params() const { return params_; }

private:
    SystemParams params_;
};

AbelCoefficients abel_coefficients(const SystemParams& params);

struct SigmaThresholds {
    double sigma_a_minus = 0.0;
    double sigma_a_plus = 0.0;
    /// sigma_a / 2, the interval of the uniqueness condition (ii).
    double sigma_b_minus = 0.0;
    double sigma_b_plus = 0.0;
    /// Interval of p1 on which the Abel coefficient b() changes sign.
    double abel_b_minus = 0.0;
    double abel_b_plus = 0.0;
};

/// Requires |s2| > 1.
SigmaThresholds sigma_thresholds(const SystemParams& params);

/// SystemParams with p1 set to sigma_a_plus (or sigma_a_minus) of the remaining parameters.
SystemParams at_sigma_a(double p2, double s1, double s2, bool plus);

/// Points (sin 6t, cos 6t) on the unit circle where A vanishes, when real.
struct UnitCircleZeros {
    double x_plus, y_plus, x_minus, y_minus;
};
std::optional<UnitCircleZeros> a_zero_set(const SystemParams& params);
/// Zero set of b_threshold_form.
std::optional<UnitCircleZeros> b_threshold_form_zero_set(const SystemParams& params);

/// x = r / (p2 + r c(theta)). Throws SingularTransform when the denominator vanishes.
double cherkas_forward(const SystemParams& params, const PolarState& s);
/// r = p2 x / (1 - c(theta) x). Throws SingularTransform on the image of infinity.
double cherkas_inverse(const SystemParams& params, double x, double theta);

struct SignCertificate {
    bool a_keeps_sign = false;
    bool b_keeps_sign = false;
};

/// Threshold-membership verdicts, confirmed by sampling A and B on 10^4 points of a period.
/// Throws ConsistencyError if the two disagree away from a threshold.
SignCertificate sign_certificate(const SystemParams& params);

enum class Certificate { AtMostOneLC, Inconclusive };

struct RegionReport {
    bool condition_i = false;
    bool condition_ii = false;
    int equilibria_count = 1;
    bool a_keeps_sign = false;
    bool b_keeps_sign = false;
    Certificate certificate = Certificate::Inconclusive;
    SigmaThresholds thresholds;
    QuadraticFormValue q;
};

RegionReport region_report(const SystemParams& params, const EquilibriaOptions& options = {});

const char* to_string(Certificate c);

}  // namespace z6
