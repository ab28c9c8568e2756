#pragma once

namespace satsnet {

/// Hidden-unit activation selector.
///
/// ArandaFree and ArandaFixed both evaluate the one-parameter asymmetric
/// sigmoid f_lambda(x) = 1 - (1 + lambda*e^x)^(-1/lambda); Free means the
/// global search treats lambda as an extra coordinate. Logit is the
/// logistic sigmoid (pointwise equal to lambda = 1) and Cloglog the
/// complement log-log 1 - exp(-e^x), the analytic lambda -> 0 limit.
enum class ActivationKind { ArandaFree, ArandaFixed, Logit, Cloglog };

struct ActivationSpec {
    ActivationKind kind = ActivationKind::Logit;
    double lambda = 1.0;      // meaningful for ArandaFree / ArandaFixed
    double lambda_min = 1e-3; // search bounds, ArandaFree only
    double lambda_max = 10.0;

    static ActivationSpec aranda_free(double lambda = 1.0, double lambda_min = 1e-3,
                                      double lambda_max = 10.0);
    static ActivationSpec aranda_fixed(double lambda);
    static ActivationSpec logit();
    static ActivationSpec cloglog();

    bool has_lambda() const {
        return kind == ActivationKind::ArandaFree || kind == ActivationKind::ArandaFixed;
    }
    bool lambda_is_free() const { return kind == ActivationKind::ArandaFree; }

    /// Throws std::domain_error on lambda <= 0, non-finite lambda, or an
    /// inverted/out-of-range search interval.
    void validate() const;
};

/// Value of the configured sigmoid at x. Saturates smoothly toward 0/1 for
/// large |x|; the power term is evaluated in log space so no intermediate
/// overflows. Throws std::domain_error for non-finite x or invalid spec.
double eval(const ActivationSpec& spec, double x);

/// First derivative of eval with respect to x; positive for all finite x
/// until it underflows in the far tails.
double eval_deriv(const ActivationSpec& spec, double x);

} // namespace satsnet
