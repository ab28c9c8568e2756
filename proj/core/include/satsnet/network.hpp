#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "satsnet/activation.hpp"
#include "satsnet/rng.hpp"

namespace satsnet {

/// p-q-1 feedforward shape: `inputs` lag values feed `hidden` sigmoid units
/// feeding one linear output.
struct Topology {
    int inputs = 1;
    int hidden = 1;
    int outputs = 1; // fixed to 1 throughout this project

    void validate() const; // throws std::invalid_argument
};

/// All adjustable parameters of the network. lambda lives in `activation`
/// and is carried in the flat vector only when the spec declares it free.
struct MlpParams {
    Topology topology;
    ActivationSpec activation;
    std::vector<double> hidden_weights; // hidden x inputs, row-major
    std::vector<double> hidden_biases;  // hidden
    std::vector<double> output_weights; // hidden
    double output_bias = 0.0;
};

struct ForwardResult {
    double output = 0.0;
    std::vector<double> hidden_pre; // pre-activation, per hidden unit
    std::vector<double> hidden_act; // post-activation
};

/// Candidate point for the global search: flat parameter vector plus its cost.
struct Solution {
    std::vector<double> vector;
    double cost = 0.0;
};

/// Number of adjustable parameters: inputs*hidden + hidden (output weights)
/// + hidden + 1 (biases), plus one more slot when lambda is free.
std::size_t param_count(const Topology& topology, const ActivationSpec& spec);

/// Draws every weight and bias from U(0,1); a free lambda starts at 1
/// (the logistic member of the family).
MlpParams init_params(const Topology& topology, const ActivationSpec& spec, Rng& rng);

ForwardResult forward(const MlpParams& params, std::span<const double> input);

/// Flat layout: hidden_weights row-major, hidden_biases, output_weights,
/// output_bias, then lambda iff free. unflatten(flatten(p)) == p exactly.
std::vector<double> flatten(const MlpParams& params);
MlpParams unflatten(const Topology& topology, const ActivationSpec& spec,
                    std::span<const double> flat);

/// JSON checkpoint of (topology, activation spec, flat vector).
std::string params_to_json(const MlpParams& params);
MlpParams params_from_json(const std::string& text);

} // namespace satsnet
