#include "satsnet/global_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "satsnet/errors.hpp"

namespace satsnet {

void SaTsConfig::validate() const {
    if (!(initial_temp > 0.0)) throw std::invalid_argument("initial_temp must be > 0");
    if (iters_per_temp < 1) throw std::invalid_argument("iters_per_temp must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (pool_size < 1) throw std::invalid_argument("pool_size must be >= 1");
    if (!(tabu_radius > 0.0)) throw std::invalid_argument("tabu_radius must be > 0");
    if (sigma_weights < 0.0 || sigma_lambda < 0.0) {
        throw std::invalid_argument("perturbation scales must be >= 0");
    }
}

bool TabuList::contains(std::span<const double> vector) const {
    const double r2 = radius_ * radius_;
    for (const auto& entry : entries_) {
        if (entry.size() != vector.size()) {
            continue;
        }
        double d2 = 0.0;
        for (std::size_t i = 0; i < vector.size(); ++i) {
            const double d = entry[i] - vector[i];
            d2 += d * d;
            if (d2 >= r2) {
                break;
            }
        }
        if (d2 < r2) {
            return true;
        }
    }
    return false;
}

void TabuList::push(std::vector<double> vector) {
    entries_.push_back(std::move(vector));
    while (entries_.size() > capacity_) {
        entries_.pop_front();
    }
}

double cooling_factor(long iteration, int iters_per_temp) {
    const long block = (iteration - 1) / iters_per_temp;
    return 1.0 / std::log(static_cast<double>(block * iters_per_temp) + std::exp(1.0));
}

std::vector<double> propose(const Solution& current, const SaTsConfig& config,
                            const SearchSpace& space, Rng& rng) {
    std::vector<double> candidate = current.vector;
    const std::size_t lambda_index =
        space.lambda ? space.lambda->index : std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        if (i == lambda_index) {
            continue;
        }
        candidate[i] += rng.gaussian(0.0, config.sigma_weights);
    }
    if (space.lambda) {
        if (config.sigma_lambda > 0.0) {
            const double log_lambda =
                std::log(candidate[lambda_index]) + rng.gaussian(0.0, config.sigma_lambda);
            candidate[lambda_index] =
                std::clamp(std::exp(log_lambda), space.lambda->min, space.lambda->max);
        } else {
            candidate[lambda_index] =
                std::clamp(candidate[lambda_index], space.lambda->min, space.lambda->max);
        }
    }
    return candidate;
}

bool metropolis_accept(double delta, double temperature, Rng& rng) {
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("metropolis_accept: temperature must be > 0");
    }
    if (delta < 0.0) {
        return true;
    }
    return rng.uniform01() < std::exp(-delta / temperature);
}

OptimizeResult optimize(const CostFn& cost_fn, const Solution& init, const SaTsConfig& config,
                        const SearchSpace& space, const StopFn& stop) {
    config.validate();
    if (init.vector.size() != space.dimension) {
        throw std::invalid_argument("optimize: init vector length " +
                                    std::to_string(init.vector.size()) +
                                    " does not match search dimension " +
                                    std::to_string(space.dimension));
    }
    constexpr double kInf = std::numeric_limits<double>::infinity();
    auto safe_cost = [&](std::span<const double> v) {
        const double c = cost_fn(v);
        return std::isfinite(c) ? c : kInf;
    };

    Solution current = init;
    current.cost = cost_fn(init.vector);
    if (!std::isfinite(current.cost)) {
        throw NumericError("optimize: initial solution has non-finite cost");
    }
    Solution best = current;

    Rng rng(config.seed);
    TabuList tabu(config.tabu_len, config.tabu_radius);
    double temperature = config.initial_temp;

    OptimizeResult result;
    result.history.reserve(static_cast<std::size_t>(config.max_iters));

    std::vector<std::vector<double>> pool(static_cast<std::size_t>(config.pool_size));
    for (int it = 1; it <= config.max_iters; ++it) {
        if (it > 1 && (it - 1) % config.iters_per_temp == 0) {
            temperature *= cooling_factor(it, config.iters_per_temp);
            if (stop && stop(best)) {
                result.stopped_early = true;
                break;
            }
        }

        for (auto& candidate : pool) {
            candidate = propose(current, config, space, rng);
        }

        // Pool best, skipping tabu members; if everything is tabu fall back
        // to the unfiltered pool so the chain never stalls.
        double best_cost = kInf;
        const std::vector<double>* chosen = nullptr;
        for (const auto& candidate : pool) {
            if (tabu.contains(candidate)) {
                continue;
            }
            const double c = safe_cost(candidate);
            if (chosen == nullptr || c < best_cost) {
                chosen = &candidate;
                best_cost = c;
            }
        }
        if (chosen == nullptr) {
            for (const auto& candidate : pool) {
                const double c = safe_cost(candidate);
                if (chosen == nullptr || c < best_cost) {
                    chosen = &candidate;
                    best_cost = c;
                }
            }
        }

        const double delta = best_cost - current.cost;
        if (metropolis_accept(delta, temperature, rng)) {
            current.vector = *chosen;
            current.cost = best_cost;
        }
        tabu.push(current.vector);
        if (current.cost < best.cost) {
            best = current;
        }
        result.history.push_back({it, temperature, current.cost, best.cost});
        result.iterations_run = it;
    }

    result.best = std::move(best);
    return result;
}

void write_history_csv(std::span<const HistoryPoint> history, std::ostream& out) {
    out << "iteration,temperature,current_cost,best_cost\n";
    for (const HistoryPoint& h : history) {
        out << h.iteration << ',' << h.temperature << ',' << h.current_cost << ','
            << h.best_cost << '\n';
    }
}

} // namespace satsnet
