#include "satsnet/local_opt.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "satsnet/errors.hpp"

namespace satsnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Weights and biases in flat order, lambda excluded.
std::size_t trainable_count(const MlpParams& params) {
    const std::size_t p = static_cast<std::size_t>(params.topology.inputs);
    const std::size_t q = static_cast<std::size_t>(params.topology.hidden);
    return q * p + q + q + 1;
}

// theta += scale * delta over the trainable coordinates.
void apply_update(MlpParams& params, std::span<const double> delta, double scale) {
    std::size_t i = 0;
    for (auto& w : params.hidden_weights) w += scale * delta[i++];
    for (auto& b : params.hidden_biases) b += scale * delta[i++];
    for (auto& w : params.output_weights) w += scale * delta[i++];
    params.output_bias += scale * delta[i++];
}

void require_patterns(const Supervised& data, const char* who) {
    if (data.empty()) {
        throw DataError(std::string(who) + ": empty training set");
    }
}

// Tracks validation cost and decides when to stop. The caller's starting
// parameters count as the first checkpoint, so refinement never returns
// something worse on validation than what it was given.
class ValidationTracker {
public:
    ValidationTracker(const Supervised* val, bool use_patience, int patience, bool use_gl,
                      double gl_threshold, const MlpParams& initial)
        : val_(val), use_patience_(use_patience), patience_(patience), use_gl_(use_gl),
          gl_threshold_(gl_threshold) {
        if (active()) {
            best_cost_ = cost(initial, *val_);
            best_params_ = initial;
        }
    }

    bool active() const { return val_ != nullptr && !val_->empty(); }

    // Records the epoch's validation cost; returns true when a stop rule fires.
    bool record(const MlpParams& params, std::vector<double>& val_history,
                StopReason& reason) {
        if (!active()) {
            return false;
        }
        const double vc = cost(params, *val_);
        if (!val_history.empty() && vc > val_history.back()) {
            ++consecutive_up_;
        } else {
            consecutive_up_ = 0;
        }
        val_history.push_back(vc);
        if (vc < best_cost_) {
            best_cost_ = vc;
            best_params_ = params;
        }
        if (use_patience_ && patience_ > 0 && consecutive_up_ >= patience_) {
            reason = StopReason::Patience;
            return true;
        }
        if (use_gl_ && gl5(val_history, gl_threshold_)) {
            reason = StopReason::Gl5;
            return true;
        }
        return false;
    }

    MlpParams take_best(MlpParams fallback) {
        return active() ? std::move(best_params_) : std::move(fallback);
    }

private:
    const Supervised* val_;
    bool use_patience_;
    int patience_;
    bool use_gl_;
    double gl_threshold_;
    double best_cost_ = kInf;
    MlpParams best_params_;
    int consecutive_up_ = 0;
};

} // namespace

void BpmConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("momentum must be in [0, 1)");
    if (max_epochs < 0) throw std::invalid_argument("max_epochs must be >= 0");
}

void LmConfig::validate() const {
    if (!(mu0 > 0.0)) throw std::invalid_argument("mu0 must be > 0");
    if (!(mu_up > 1.0) || !(mu_down > 1.0)) throw std::invalid_argument("mu factors must be > 1");
    if (max_epochs < 0) throw std::invalid_argument("max_epochs must be >= 0");
}

std::string stop_reason_name(StopReason reason) {
    switch (reason) {
    case StopReason::MaxEpochs: return "max_epochs";
    case StopReason::Patience: return "patience";
    case StopReason::Gl5: return "gl5";
    case StopReason::Stalled: return "stalled";
    }
    return "unknown";
}

double cost(const MlpParams& params, const Supervised& data) {
    require_patterns(data, "cost");
    const std::size_t p = static_cast<std::size_t>(params.topology.inputs);
    const std::size_t q = static_cast<std::size_t>(params.topology.hidden);
    if (data.X.cols != p) {
        throw DataError("cost: pattern width " + std::to_string(data.X.cols) +
                        " does not match " + std::to_string(p) + " network inputs");
    }
    double sse = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j) {
        const double* x = data.X.data.data() + j * p;
        double yhat = params.output_bias;
        for (std::size_t k = 0; k < q; ++k) {
            double z = params.hidden_biases[k];
            const double* row = params.hidden_weights.data() + k * p;
            for (std::size_t l = 0; l < p; ++l) {
                z += row[l] * x[l];
            }
            yhat += params.output_weights[k] * eval(params.activation, z);
        }
        const double e = data.y[j] - yhat;
        sse += e * e;
    }
    return sse / static_cast<double>(data.size());
}

std::vector<double> residuals(const MlpParams& params, const Supervised& data) {
    require_patterns(data, "residuals");
    std::vector<double> r(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
        r[j] = data.y[j] - forward(params, data.X.row(j)).output;
    }
    return r;
}

std::vector<double> gradient(const MlpParams& params, const Supervised& data) {
    require_patterns(data, "gradient");
    const std::size_t p = static_cast<std::size_t>(params.topology.inputs);
    const std::size_t q = static_cast<std::size_t>(params.topology.hidden);
    const std::size_t d = trainable_count(params);
    std::vector<double> grad(d, 0.0);
    double* g_hw = grad.data();
    double* g_hb = grad.data() + q * p;
    double* g_ow = grad.data() + q * p + q;
    double* g_ob = grad.data() + q * p + 2 * q;

    for (std::size_t j = 0; j < data.size(); ++j) {
        const double* x = data.X.data.data() + j * p;
        double yhat = params.output_bias;
        std::vector<double> z(q), a(q);
        for (std::size_t k = 0; k < q; ++k) {
            double zk = params.hidden_biases[k];
            const double* row = params.hidden_weights.data() + k * p;
            for (std::size_t l = 0; l < p; ++l) {
                zk += row[l] * x[l];
            }
            z[k] = zk;
            a[k] = eval(params.activation, zk);
            yhat += params.output_weights[k] * a[k];
        }
        const double r = data.y[j] - yhat;
        // dC/dtheta = -(2/n) * sum_j r_j * dyhat_j/dtheta
        for (std::size_t k = 0; k < q; ++k) {
            const double back = r * params.output_weights[k] * eval_deriv(params.activation, z[k]);
            for (std::size_t l = 0; l < p; ++l) {
                g_hw[k * p + l] -= back * x[l];
            }
            g_hb[k] -= back;
            g_ow[k] -= r * a[k];
        }
        *g_ob -= r;
    }
    const double scale = 2.0 / static_cast<double>(data.size());
    for (double& g : grad) {
        g *= scale;
    }
    return grad;
}

RowMatrix jacobian(const MlpParams& params, const Supervised& data) {
    require_patterns(data, "jacobian");
    const std::size_t p = static_cast<std::size_t>(params.topology.inputs);
    const std::size_t q = static_cast<std::size_t>(params.topology.hidden);
    const std::size_t d = trainable_count(params);
    RowMatrix jac(data.size(), d);
    for (std::size_t j = 0; j < data.size(); ++j) {
        const double* x = data.X.data.data() + j * p;
        double* row_out = jac.data.data() + j * d;
        for (std::size_t k = 0; k < q; ++k) {
            double zk = params.hidden_biases[k];
            const double* w_row = params.hidden_weights.data() + k * p;
            for (std::size_t l = 0; l < p; ++l) {
                zk += w_row[l] * x[l];
            }
            const double ak = eval(params.activation, zk);
            const double back = params.output_weights[k] * eval_deriv(params.activation, zk);
            // r_j = t_j - yhat_j, so every entry is -dyhat/dtheta.
            for (std::size_t l = 0; l < p; ++l) {
                row_out[k * p + l] = -back * x[l];
            }
            row_out[q * p + k] = -back;
            row_out[q * p + q + k] = -ak;
        }
        row_out[q * p + 2 * q] = -1.0;
    }
    return jac;
}

TrainReport bpm_train(const MlpParams& initial, const PreparedData& prepared,
                      const BpmConfig& config) {
    config.validate();
    require_patterns(prepared.train, "bpm_train");

    TrainReport report;
    report.params = initial;
    MlpParams params = initial;
    const std::size_t d = trainable_count(params);
    std::vector<double> velocity(d, 0.0);
    ValidationTracker tracker(&prepared.val, config.use_patience, config.patience,
                              config.use_gl, config.gl_threshold, params);
    report.stop_reason = StopReason::MaxEpochs;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const std::vector<double> grad = gradient(params, prepared.train);
        for (std::size_t i = 0; i < d; ++i) {
            velocity[i] = -config.learning_rate * grad[i] + config.momentum * velocity[i];
        }
        apply_update(params, velocity, 1.0);
        report.train_history.push_back(cost(params, prepared.train));
        report.epochs_run = epoch;
        if (tracker.record(params, report.val_history, report.stop_reason)) {
            break;
        }
    }
    report.params = tracker.take_best(std::move(params));
    return report;
}

TrainReport lm_train(const MlpParams& initial, const PreparedData& prepared,
                     const LmConfig& config) {
    config.validate();
    require_patterns(prepared.train, "lm_train");

    TrainReport report;
    report.params = initial;
    MlpParams params = initial;
    ValidationTracker tracker(&prepared.val, config.use_patience, config.patience,
                              config.use_gl, config.gl_threshold, params);
    report.stop_reason = StopReason::MaxEpochs;

    double mu = config.mu0;
    double current_cost = cost(params, prepared.train);

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const RowMatrix jac = jacobian(params, prepared.train);
        const std::vector<double> res = residuals(params, prepared.train);
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        Eigen::Map<const RowMajor> J(jac.data.data(), static_cast<Eigen::Index>(jac.rows),
                                     static_cast<Eigen::Index>(jac.cols));
        Eigen::Map<const Eigen::VectorXd> r(res.data(), static_cast<Eigen::Index>(res.size()));
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd Jtr = J.transpose() * r;

        bool accepted = false;
        while (mu <= config.mu_max) {
            Eigen::MatrixXd damped = JtJ;
            damped.diagonal().array() += mu;
            const Eigen::VectorXd delta = damped.ldlt().solve(Jtr);
            if (!delta.allFinite()) {
                mu *= config.mu_up;
                continue;
            }
            MlpParams tentative = params;
            apply_update(tentative, std::span<const double>(delta.data(),
                                                            static_cast<std::size_t>(delta.size())),
                         -1.0);
            const double tentative_cost = cost(tentative, prepared.train);
            if (std::isfinite(tentative_cost) && tentative_cost < current_cost) {
                params = std::move(tentative);
                current_cost = tentative_cost;
                mu = std::max(mu / config.mu_down, 1e-20);
                accepted = true;
                break;
            }
            mu *= config.mu_up;
        }
        if (!accepted) {
            report.stop_reason = StopReason::Stalled;
            break;
        }
        report.train_history.push_back(current_cost);
        report.epochs_run = epoch;
        if (tracker.record(params, report.val_history, report.stop_reason)) {
            break;
        }
    }
    report.params = tracker.take_best(std::move(params));
    return report;
}

bool gl5(std::span<const double> val_history, double threshold) {
    if (val_history.empty()) {
        return false;
    }
    const double best = *std::min_element(val_history.begin(), val_history.end());
    if (!(best > 0.0)) {
        return false; // growth ratio undefined at a zero/negative optimum
    }
    return 100.0 * (val_history.back() / best - 1.0) > threshold;
}

} // namespace satsnet
