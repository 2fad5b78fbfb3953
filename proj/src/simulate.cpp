#include "ruinlab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ruinlab/markov.hpp"
#include "ruinlab/numerics.hpp"

namespace ruinlab::simulate {

namespace {

constexpr double kNoRuin = std::numeric_limits<double>::infinity();

int resolve_threads(int requested, std::uint64_t paths) {
    int threads = requested > 0
                      ? requested
                      : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) {
        threads = 1;
    }
    if (static_cast<std::uint64_t>(threads) > paths) {
        threads = static_cast<int>(paths);
    }
    return threads;
}

double draw_claim(const model::ClaimDistribution& dist, numerics::RngStream& rng) {
    switch (dist.kind) {
        case model::ClaimDistribution::Kind::Exponential:
            return rng.next_exponential(dist.p1);
        case model::ClaimDistribution::Kind::Gamma:
            return rng.next_gamma(dist.p1, dist.p2);
        case model::ClaimDistribution::Kind::Deterministic:
            break;
    }
    return dist.p1;
}

// The path worker. Draw order is fixed: optional stationary-start uniform,
// the environment path, then each component's claims in index order; that
// order is what makes a path a pure function of (seed, path_index).
PathOutcome simulate_one(const model::RiskModel& model,
                         const std::vector<double>& initial_capital,
                         double horizon, int initial_state,
                         const std::vector<double>* stationary,
                         numerics::RngStream& rng) {
    int state0 = initial_state;
    if (state0 < 0) {
        const double target = rng.next_uniform();
        double cumulative = 0.0;
        state0 = model.environment.states - 1;
        for (int j = 0; j < model.environment.states; ++j) {
            cumulative += (*stationary)[j];
            if (target <= cumulative) {
                state0 = j;
                break;
            }
        }
    }
    const markov::EnvironmentPath path =
        markov::sample_environment_path(model.environment, state0, horizon, rng);

    PathOutcome out;
    out.ruin_time.assign(static_cast<std::size_t>(model.components), kNoRuin);
    const std::size_t segments = path.times.size();
    for (int i = 0; i < model.components; ++i) {
        const double premium = model.premiums[i];
        const double u0 = initial_capital[i];
        double claims_total = 0.0;
        double ruin_at = kNoRuin;
        for (std::size_t k = 0; k < segments; ++k) {
            const double seg_end = k + 1 < segments ? path.times[k + 1] : horizon;
            const int state = path.states[k];
            const double lambda = model.arrival_rate(i, state);
            if (!(lambda > 0.0)) {
                continue;
            }
            const model::ClaimDistribution& dist = model.claim(i, state);
            // Homogeneous Poisson arrivals within the segment; memorylessness
            // makes restarting the exponential clock at each segment exact.
            double t = path.times[k] + rng.next_exponential(1.0 / lambda);
            while (t < seg_end) {
                claims_total += draw_claim(dist, rng);
                if (ruin_at == kNoRuin) {
                    // Ruin is strict: a surplus of exactly zero survives.
                    const double surplus = u0 + premium * t - claims_total;
                    if (surplus < 0.0) {
                        ruin_at = t;
                    }
                }
                // Claims keep flowing after ruin so the draw sequence, and
                // with it every other component of this path, is unaffected
                // by where ruin happened (common random numbers).
                t += rng.next_exponential(1.0 / lambda);
            }
        }
        out.ruin_time[static_cast<std::size_t>(i)] = ruin_at;
    }
    return out;
}

bool query_hit(const PathOutcome& outcome, const model::RuinQuery& query,
               double horizon) {
    switch (query.mode) {
        case model::RuinQuery::Mode::AllComponents:
            for (std::size_t i = 0; i < outcome.ruin_time.size(); ++i) {
                if (!outcome.ruined(static_cast<int>(i), horizon)) {
                    return false;
                }
            }
            return true;
        case model::RuinQuery::Mode::AnyComponent:
            for (std::size_t i = 0; i < outcome.ruin_time.size(); ++i) {
                if (outcome.ruined(static_cast<int>(i), horizon)) {
                    return true;
                }
            }
            return false;
        case model::RuinQuery::Mode::Marginal:
            return outcome.ruined(query.marginal, horizon);
        case model::RuinQuery::Mode::Subset:
            for (int idx : query.subset) {
                if (!outcome.ruined(idx, horizon)) {
                    return false;
                }
            }
            return true;
    }
    return false;
}

}  // namespace

PathOutcome simulate_path(const model::RiskModel& model,
                          const std::vector<double>& initial_capital,
                          double horizon, int initial_state,
                          std::uint64_t seed, std::uint64_t path_index) {
    std::vector<double> stationary;
    const std::vector<double>* stationary_ptr = nullptr;
    if (initial_state < 0) {
        stationary = markov::stationary_distribution(model.environment).pi;
        stationary_ptr = &stationary;
    }
    numerics::RngStream rng(seed, path_index);
    return simulate_one(model, initial_capital, horizon, initial_state,
                        stationary_ptr, rng);
}

std::vector<MonteCarloEstimate> estimate_ruin_grid(
    const model::RiskModel& model, const model::RuinQuery& query,
    const std::vector<double>& horizons, const McConfig& cfg) {
    if (horizons.empty()) {
        throw std::invalid_argument("estimate_ruin_grid: horizon grid is empty");
    }
    double horizon_max = 0.0;
    for (double h : horizons) {
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw std::invalid_argument("estimate_ruin_grid: horizons must be positive and finite");
        }
        horizon_max = std::max(horizon_max, h);
    }
    model::RuinQuery probe = query;
    probe.horizon = horizon_max;
    const std::vector<model::Violation> violations = model::validate(model, probe);
    if (!violations.empty()) {
        throw std::invalid_argument("estimate_ruin: " + violations.front().message);
    }
    if (cfg.paths == 0) {
        throw std::invalid_argument("estimate_ruin: needs at least one path");
    }
    if (!(cfg.confidence > 0.0) || !(cfg.confidence < 1.0)) {
        throw std::invalid_argument("estimate_ruin: confidence must lie in (0, 1)");
    }

    std::vector<double> stationary;
    const std::vector<double>* stationary_ptr = nullptr;
    if (query.initial_state < 0) {
        stationary = markov::stationary_distribution(model.environment).pi;
        stationary_ptr = &stationary;
    }

    const int threads = resolve_threads(cfg.threads, cfg.paths);
    std::vector<std::vector<std::uint64_t>> hits(
        static_cast<std::size_t>(threads),
        std::vector<std::uint64_t>(horizons.size(), 0));

    auto worker = [&](int slot) {
        // Contiguous path ranges per thread; since path p depends only on
        // (seed, p), the partition never changes any outcome, only wall time.
        const std::uint64_t lo = cfg.paths * static_cast<std::uint64_t>(slot) /
                                 static_cast<std::uint64_t>(threads);
        const std::uint64_t hi = cfg.paths * (static_cast<std::uint64_t>(slot) + 1) /
                                 static_cast<std::uint64_t>(threads);
        std::vector<std::uint64_t>& mine = hits[static_cast<std::size_t>(slot)];
        for (std::uint64_t p = lo; p < hi; ++p) {
            numerics::RngStream rng(cfg.seed, p);
            const PathOutcome outcome =
                simulate_one(model, query.initial_capital, horizon_max,
                             query.initial_state, stationary_ptr, rng);
            for (std::size_t h = 0; h < horizons.size(); ++h) {
                if (query_hit(outcome, query, horizons[h])) {
                    ++mine[h];
                }
            }
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(worker, t);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    const double z = numerics::normal_quantile(0.5 + cfg.confidence / 2.0);
    std::vector<MonteCarloEstimate> out(horizons.size());
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        std::uint64_t total = 0;
        for (int t = 0; t < threads; ++t) {
            total += hits[static_cast<std::size_t>(t)][h];
        }
        MonteCarloEstimate& e = out[h];
        e.paths = cfg.paths;
        e.confidence = cfg.confidence;
        e.estimate = static_cast<double>(total) / static_cast<double>(cfg.paths);
        e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) /
                                static_cast<double>(cfg.paths));
        e.ci_low = std::max(0.0, e.estimate - z * e.std_error);
        e.ci_high = std::min(1.0, e.estimate + z * e.std_error);
    }
    return out;
}

MonteCarloEstimate estimate_ruin(const model::RiskModel& model,
                                 const model::RuinQuery& query,
                                 const McConfig& cfg) {
    return estimate_ruin_grid(model, query, {query.horizon}, cfg).front();
}

}  // namespace ruinlab::simulate
