#include "satsnet/activation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace satsnet {

namespace {

// ln(1 + e^u) without overflow on either side.
double softplus(double u) {
    return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// f_lambda(x) = 1 - (1 + lambda*e^x)^(-1/lambda)
//             = -expm1(-ln(1 + e^(x + ln lambda)) / lambda)
double aranda(double lambda, double x) {
    return -std::expm1(-softplus(x + std::log(lambda)) / lambda);
}

// f_lambda'(x) = (1 + lambda*e^x)^(-(1+lambda)/lambda) * e^x
double aranda_deriv(double lambda, double x) {
    const double t = softplus(x + std::log(lambda));
    return std::exp(x - (1.0 + lambda) / lambda * t);
}

void check_finite_input(double x) {
    if (!std::isfinite(x)) {
        throw std::domain_error("activation input must be finite, got " + std::to_string(x));
    }
}

} // namespace

ActivationSpec ActivationSpec::aranda_free(double lambda, double lambda_min, double lambda_max) {
    ActivationSpec spec;
    spec.kind = ActivationKind::ArandaFree;
    spec.lambda = lambda;
    spec.lambda_min = lambda_min;
    spec.lambda_max = lambda_max;
    spec.validate();
    return spec;
}

ActivationSpec ActivationSpec::aranda_fixed(double lambda) {
    ActivationSpec spec;
    spec.kind = ActivationKind::ArandaFixed;
    spec.lambda = lambda;
    spec.validate();
    return spec;
}

ActivationSpec ActivationSpec::logit() {
    ActivationSpec spec;
    spec.kind = ActivationKind::Logit;
    return spec;
}

ActivationSpec ActivationSpec::cloglog() {
    ActivationSpec spec;
    spec.kind = ActivationKind::Cloglog;
    return spec;
}

void ActivationSpec::validate() const {
    if (!has_lambda()) {
        return;
    }
    if (!std::isfinite(lambda) || lambda <= 0.0) {
        throw std::domain_error("activation lambda must be a positive finite real, got " +
                                std::to_string(lambda));
    }
    if (kind == ActivationKind::ArandaFree) {
        if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min)) {
            throw std::domain_error("invalid lambda search range [" + std::to_string(lambda_min) +
                                    ", " + std::to_string(lambda_max) + "]");
        }
        if (lambda < lambda_min || lambda > lambda_max) {
            throw std::domain_error("lambda " + std::to_string(lambda) +
                                    " lies outside its search range");
        }
    }
}

double eval(const ActivationSpec& spec, double x) {
    check_finite_input(x);
    spec.validate();
    switch (spec.kind) {
    case ActivationKind::ArandaFree:
    case ActivationKind::ArandaFixed:
        return aranda(spec.lambda, x);
    case ActivationKind::Logit:
        return logistic(x);
    case ActivationKind::Cloglog:
        // Closed form of the lambda -> 0 limit; never computed by pushing a
        // tiny lambda through the general formula.
        return -std::expm1(-std::exp(x));
    }
    throw std::domain_error("unknown activation kind");
}

double eval_deriv(const ActivationSpec& spec, double x) {
    check_finite_input(x);
    spec.validate();
    switch (spec.kind) {
    case ActivationKind::ArandaFree:
    case ActivationKind::ArandaFixed:
        return aranda_deriv(spec.lambda, x);
    case ActivationKind::Logit:
        // e^x / (1 + e^x)^2, kept in log space for large |x|
        return std::exp(x - 2.0 * softplus(x));
    case ActivationKind::Cloglog:
        return std::exp(x - std::exp(x));
    }
    throw std::domain_error("unknown activation kind");
}

} // namespace satsnet
