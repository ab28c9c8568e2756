#pragma once

#include <span>
#include <string>
#include <vector>

#include "satsnet/dataprep.hpp"
#include "satsnet/matrix.hpp"
#include "satsnet/network.hpp"

namespace satsnet {

/// Backpropagation-with-momentum settings. The two validation rules
/// (patience on consecutive increases, GL growth threshold) can be toggled
/// independently; both are active by default and whichever fires first
/// stops training.
struct BpmConfig {
    double learning_rate = 0.001;
    double momentum = 0.9;
    int max_epochs = 10000;
    int patience = 5;
    double gl_threshold = 5.0; // percent
    bool use_patience = true;
    bool use_gl = true;

    void validate() const;
};

struct LmConfig {
    double mu0 = 1e-3;
    double mu_up = 10.0;
    double mu_down = 10.0;
    double mu_max = 1e10;
    int max_epochs = 10000;
    int patience = 5;
    double gl_threshold = 5.0;
    bool use_patience = true;
    bool use_gl = true;

    void validate() const;
};

enum class StopReason { MaxEpochs, Patience, Gl5, Stalled };

std::string stop_reason_name(StopReason reason);

struct TrainReport {
    MlpParams params; // best-validation parameters (final when no val set)
    int epochs_run = 0;
    std::vector<double> train_history; // cost after each epoch
    std::vector<double> val_history;   // empty when no validation set
    StopReason stop_reason = StopReason::MaxEpochs;
};

/// Mean squared error over the supervised set.
double cost(const MlpParams& params, const Supervised& data);

/// Exact gradient of cost with respect to weights and biases, flat-vector
/// order. lambda is never a training coordinate, so the result has
/// param_count - 1 entries when lambda is free.
std::vector<double> gradient(const MlpParams& params, const Supervised& data);

/// Residuals r_j = t_j - yhat_j.
std::vector<double> residuals(const MlpParams& params, const Supervised& data);

/// n x d matrix of dr_j/dtheta over weights and biases (d excludes a free
/// lambda). The chain rule gives gradient == (2/n) * J^T r.
RowMatrix jacobian(const MlpParams& params, const Supervised& data);

/// Full-batch gradient descent with momentum and validation early stopping.
TrainReport bpm_train(const MlpParams& params, const PreparedData& prepared,
                      const BpmConfig& config);

/// Damped Gauss-Newton: solves (J^T J + mu I) delta = J^T r each epoch and
/// applies theta <- theta - delta when it lowers the cost, adapting mu.
/// Accepted costs decrease strictly; when no mu <= mu_max yields a decrease
/// the run stops with StopReason::Stalled.
TrainReport lm_train(const MlpParams& params, const PreparedData& prepared,
                     const LmConfig& config);

/// Growth-loss rule: true iff the last validation cost exceeds the best
/// one seen by more than `threshold` percent.
bool gl5(std::span<const double> val_history, double threshold);

} // namespace satsnet
