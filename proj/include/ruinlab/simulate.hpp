// Exact Monte Carlo for the modulated risk model. Paths are simulated at
// claim epochs (the only instants where ruin can newly occur), so estimates
// carry no discretization bias. Every path is addressed by its index: path
// p of a run draws from stream p of the run's seed, which makes estimates
// independent of the thread count, bitwise.
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "ruinlab/model.hpp"

namespace ruinlab::simulate {

// Per-component outcome of one simulated path: the first time the component
// surplus went strictly negative, or +infinity if it survived the horizon.
// Recording times rather than flags lets one batch of paths answer a whole
// grid of horizons.
struct PathOutcome {
    std::vector<double> ruin_time;

    bool ruined(int component, double horizon) const {
        return ruin_time[component] <= horizon;
    }
};

// A Monte Carlo estimate with its sampling uncertainty. The interval is the
// normal approximation at the requested confidence level.
struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t paths = 0;
    double confidence = 0.95;
};

// Simulation controls. threads == 0 means use the hardware concurrency.
struct McConfig {
    std::uint64_t paths = 100000;
    std::uint64_t seed = 1;
    double confidence = 0.95;
    int threads = 0;
};

// Simulates path `path_index` of the run keyed by `seed`: environment
// trajectory, then per-component claim arrivals and sizes over the full
// horizon (claims are generated to the horizon even after a component is
// ruined, so outcomes are monotone in the initial capital under common
// random numbers). Initial state -1 draws from the stationary law.
PathOutcome simulate_path(const model::RiskModel& model,
                          const std::vector<double>& initial_capital,
                          double horizon, int initial_state,
                          std::uint64_t seed, std::uint64_t path_index);

// Estimates the query probability from cfg.paths independent paths.
// Throws std::invalid_argument when validate(model, query) reports
// violations.
MonteCarloEstimate estimate_ruin(const model::RiskModel& model,
                                 const model::RuinQuery& query,
                                 const McConfig& cfg);

// Estimates the query probability at several horizons from ONE set of
// paths, simulated to the largest horizon. Entry k corresponds to
// horizons[k]. The estimates are positively coupled across horizons, which
// is what a deviation-versus-horizon study wants.
std::vector<MonteCarloEstimate> estimate_ruin_grid(
    const model::RiskModel& model, const model::RuinQuery& query,
    const std::vector<double>& horizons, const McConfig& cfg);

}  // namespace ruinlab::simulate
