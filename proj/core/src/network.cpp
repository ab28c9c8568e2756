#include "satsnet/network.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

namespace satsnet {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string kind_name(ActivationKind kind) {
    switch (kind) {
    case ActivationKind::ArandaFree: return "aranda_free";
    case ActivationKind::ArandaFixed: return "aranda_fixed";
    case ActivationKind::Logit: return "logit";
    case ActivationKind::Cloglog: return "cloglog";
    }
    throw std::invalid_argument("unknown activation kind");
}

ActivationKind kind_from_name(const std::string& name) {
    if (name == "aranda_free") return ActivationKind::ArandaFree;
    if (name == "aranda_fixed") return ActivationKind::ArandaFixed;
    if (name == "logit") return ActivationKind::Logit;
    if (name == "cloglog") return ActivationKind::Cloglog;
    throw std::invalid_argument("unknown activation kind '" + name + "'");
}

} // namespace

void Topology::validate() const {
    if (inputs < 1) {
        throw std::invalid_argument("topology needs at least one input, got " +
                                    std::to_string(inputs));
    }
    if (hidden < 1) {
        throw std::invalid_argument("topology needs at least one hidden unit, got " +
                                    std::to_string(hidden));
    }
    if (outputs != 1) {
        throw std::invalid_argument("only single-output networks are supported");
    }
}

std::size_t param_count(const Topology& topology, const ActivationSpec& spec) {
    topology.validate();
    spec.validate();
    const std::size_t p = static_cast<std::size_t>(topology.inputs);
    const std::size_t q = static_cast<std::size_t>(topology.hidden);
    const std::size_t m = static_cast<std::size_t>(topology.outputs);
    std::size_t count = p * q + q * m + q + m;
    if (spec.lambda_is_free()) {
        ++count;
    }
    return count;
}

MlpParams init_params(const Topology& topology, const ActivationSpec& spec, Rng& rng) {
    topology.validate();
    spec.validate();
    MlpParams params;
    params.topology = topology;
    params.activation = spec;
    if (spec.lambda_is_free()) {
        params.activation.lambda = 1.0;
    }
    const std::size_t p = static_cast<std::size_t>(topology.inputs);
    const std::size_t q = static_cast<std::size_t>(topology.hidden);
    params.hidden_weights.resize(q * p);
    params.hidden_biases.resize(q);
    params.output_weights.resize(q);
    for (auto& w : params.hidden_weights) w = rng.uniform01();
    for (auto& b : params.hidden_biases) b = rng.uniform01();
    for (auto& w : params.output_weights) w = rng.uniform01();
    params.output_bias = rng.uniform01();
    return params;
}

ForwardResult forward(const MlpParams& params, std::span<const double> input) {
    const std::size_t p = static_cast<std::size_t>(params.topology.inputs);
    const std::size_t q = static_cast<std::size_t>(params.topology.hidden);
    if (input.size() != p) {
        throw std::invalid_argument("forward: expected " + std::to_string(p) +
                                    " inputs, got " + std::to_string(input.size()));
    }
    ForwardResult result;
    result.hidden_pre.resize(q);
    result.hidden_act.resize(q);
    double acc = params.output_bias;
    for (std::size_t k = 0; k < q; ++k) {
        double z = params.hidden_biases[k];
        const double* row = params.hidden_weights.data() + k * p;
        for (std::size_t l = 0; l < p; ++l) {
            z += row[l] * input[l];
        }
        result.hidden_pre[k] = z;
        result.hidden_act[k] = eval(params.activation, z);
        acc += params.output_weights[k] * result.hidden_act[k];
    }
    result.output = acc;
    return result;
}

std::vector<double> flatten(const MlpParams& params) {
    std::vector<double> flat;
    flat.reserve(param_count(params.topology, params.activation));
    flat.insert(flat.end(), params.hidden_weights.begin(), params.hidden_weights.end());
    flat.insert(flat.end(), params.hidden_biases.begin(), params.hidden_biases.end());
    flat.insert(flat.end(), params.output_weights.begin(), params.output_weights.end());
    flat.push_back(params.output_bias);
    if (params.activation.lambda_is_free()) {
        flat.push_back(params.activation.lambda);
    }
    return flat;
}

MlpParams unflatten(const Topology& topology, const ActivationSpec& spec,
                    std::span<const double> flat) {
    const std::size_t expected = param_count(topology, spec);
    if (flat.size() != expected) {
        throw std::invalid_argument("unflatten: expected a vector of length " +
                                    std::to_string(expected) + ", got " +
                                    std::to_string(flat.size()));
    }
    MlpParams params;
    params.topology = topology;
    params.activation = spec;
    const std::size_t p = static_cast<std::size_t>(topology.inputs);
    const std::size_t q = static_cast<std::size_t>(topology.hidden);
    auto it = flat.begin();
    params.hidden_weights.assign(it, it + q * p);
    it += q * p;
    params.hidden_biases.assign(it, it + q);
    it += q;
    params.output_weights.assign(it, it + q);
    it += q;
    params.output_bias = *it++;
    if (spec.lambda_is_free()) {
        params.activation.lambda = *it++;
    }
    return params;
}

std::string params_to_json(const MlpParams& params) {
    ordered_json j;
    j["topology"] = {{"inputs", params.topology.inputs},
                     {"hidden", params.topology.hidden},
                     {"outputs", params.topology.outputs}};
    ordered_json act;
    act["kind"] = kind_name(params.activation.kind);
    if (params.activation.has_lambda()) {
        act["lambda"] = params.activation.lambda;
    }
    if (params.activation.lambda_is_free()) {
        act["lambda_min"] = params.activation.lambda_min;
        act["lambda_max"] = params.activation.lambda_max;
    }
    j["activation"] = act;
    j["params"] = flatten(params);
    return j.dump(2);
}

MlpParams params_from_json(const std::string& text) {
    const auto j = ordered_json::parse(text);
    Topology topology;
    topology.inputs = j.at("topology").at("inputs").get<int>();
    topology.hidden = j.at("topology").at("hidden").get<int>();
    topology.outputs = j.at("topology").at("outputs").get<int>();
    ActivationSpec spec;
    spec.kind = kind_from_name(j.at("activation").at("kind").get<std::string>());
    if (j.at("activation").contains("lambda")) {
        spec.lambda = j.at("activation").at("lambda").get<double>();
    }
    if (j.at("activation").contains("lambda_min")) {
        spec.lambda_min = j.at("activation").at("lambda_min").get<double>();
        spec.lambda_max = j.at("activation").at("lambda_max").get<double>();
    }
    const auto flat = j.at("params").get<std::vector<double>>();
    return unflatten(topology, spec, flat);
}

} // namespace satsnet
