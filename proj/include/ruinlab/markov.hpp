// Environment-chain analysis: stationary law, the fundamental matrix that
// captures deviations from stationarity, switch-count probabilities, and
// path sampling.
#pragma once

#include <vector>

#include "ruinlab/model.hpp"
#include "ruinlab/numerics.hpp"

namespace ruinlab::markov {

// Stationary distribution pi of an irreducible environment chain:
// pi Q = 0, sum pi = 1, all entries positive.
struct StationaryLaw {
    std::vector<double> pi;
};

// Fundamental matrix U = (Pi - Q)^{-1} - Pi, where Pi stacks the stationary
// row. Satisfies Q U = U Q = Pi - I and U 1 = 0; the solver asserts both to
// 1e-10. Appears in the cross-component covariance of the diffusion limit.
struct FundamentalMatrix {
    int states = 0;
    std::vector<double> entries;  // row-major

    double at(int i, int j) const { return entries[i * states + j]; }
};

// One sampled environment trajectory on [0, horizon]. states[k] is occupied
// on [times[k], times[k+1]) (with times[0] == 0); the last state runs to the
// horizon.
struct EnvironmentPath {
    std::vector<double> times;
    std::vector<int> states;
    double horizon = 0.0;

    int state_at(double t) const;
    // Number of switches strictly inside [0, horizon].
    int switches() const { return static_cast<int>(states.size()) - 1; }
};

// Solves pi Q = 0 with the normalization sum pi = 1 by dense elimination.
// Throws std::invalid_argument if the chain is empty or the solve degenerates
// (reducible chains).
StationaryLaw stationary_distribution(const model::EnvironmentModel& env);

// Computes (Pi - Q)^{-1} - Pi and verifies its defining identities.
FundamentalMatrix fundamental_matrix(const model::EnvironmentModel& env);

// Probability that the chain leaves `state` at most once on [0, horizon]:
// the no-switch probability plus one-switch probabilities integrated over
// the switch time. Handles coinciding exit rates by their limit expression.
double at_most_one_switch_probability(const model::EnvironmentModel& env,
                                      int state, double horizon);

// Samples the embedded jump chain with exponential holding times until the
// horizon. Draws come sequentially from `rng`.
EnvironmentPath sample_environment_path(const model::EnvironmentModel& env,
                                        int initial_state, double horizon,
                                        numerics::RngStream& rng);

}  // namespace ruinlab::markov
