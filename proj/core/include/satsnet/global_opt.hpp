#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "satsnet/network.hpp"
#include "satsnet/rng.hpp"

namespace satsnet {

/// Hyperparameters of the simulated-annealing + tabu hybrid.
struct SaTsConfig {
    double initial_temp = 1.0; // T0
    int iters_per_temp = 10;   // I_T
    int max_iters = 10000;     // I_max
    int pool_size = 20;        // K candidates per iteration
    std::size_t tabu_len = 50;
    double tabu_radius = 1e-3; // Euclidean rejection radius
    double sigma_weights = 0.1;
    double sigma_lambda = 0.1; // log-space scale for the lambda coordinate
    std::uint64_t seed = 0;

    void validate() const; // throws std::invalid_argument
};

/// Where lambda sits in the flat vector, with its clamp bounds.
struct LambdaSlot {
    std::size_t index = 0;
    double min = 1e-3;
    double max = 10.0;
};

struct SearchSpace {
    std::size_t dimension = 0;
    std::optional<LambdaSlot> lambda;
};

/// Bounded FIFO of recent solutions; membership means Euclidean distance
/// below the configured radius.
class TabuList {
public:
    TabuList(std::size_t capacity, double radius) : capacity_(capacity), radius_(radius) {}

    bool contains(std::span<const double> vector) const;
    void push(std::vector<double> vector);
    std::size_t size() const { return entries_.size(); }

private:
    std::deque<std::vector<double>> entries_;
    std::size_t capacity_;
    double radius_;
};

/// Temperature reduction factor 1 / ln(floor((i-1)/I_T)*I_T + e).
/// Equal to 1 throughout the first block, then < 1.
double cooling_factor(long iteration, int iters_per_temp);

/// One neighbour: additive Gaussian noise on weights/biases, multiplicative
/// log-space noise with clamping on the lambda coordinate (when present).
std::vector<double> propose(const Solution& current, const SaTsConfig& config,
                            const SearchSpace& space, Rng& rng);

/// Boltzmann acceptance for minimization: improvements always pass, a
/// worsening of `delta` passes with probability exp(-delta / temperature).
bool metropolis_accept(double delta, double temperature, Rng& rng);

struct HistoryPoint {
    int iteration = 0;
    double temperature = 0.0;
    double current_cost = 0.0;
    double best_cost = 0.0;
};

using CostFn = std::function<double(std::span<const double>)>;
/// Early-stop hook, consulted at each temperature update with the best
/// solution so far (e.g. a validation-loss growth rule).
using StopFn = std::function<bool(const Solution& best)>;

struct OptimizeResult {
    Solution best;
    std::vector<HistoryPoint> history; // one entry per executed iteration
    int iterations_run = 0;
    bool stopped_early = false;
};

/// Runs the annealing chain: at every iteration K candidates are proposed,
/// tabu members discarded (unless that empties the pool), the pool's best
/// faces Metropolis acceptance, and the accepted point enters the tabu
/// list. Candidates with non-finite cost are treated as infinitely bad;
/// a non-finite initial cost throws NumericError.
OptimizeResult optimize(const CostFn& cost_fn, const Solution& init, const SaTsConfig& config,
                        const SearchSpace& space, const StopFn& stop = {});

/// CSV trace: iteration, temperature, current_cost, best_cost.
void write_history_csv(std::span<const HistoryPoint> history, std::ostream& out);

} // namespace satsnet
