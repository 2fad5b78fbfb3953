// Model descriptions: the environment (a continuous-time Markov chain), the
// per-component surplus processes it modulates, and ruin queries against
// them. Components earn premiums linearly and pay claims that arrive in
// state-dependent Poisson streams with state-dependent size distributions.
// Ruin of a component means its surplus becomes strictly negative; touching
// zero is survival.
#pragma once

#include <string>
#include <vector>

namespace ruinlab::model {

// Moments of one claim size distribution.
struct ClaimMoments {
    double mean = 0.0;
    double second_moment = 0.0;
    double variance = 0.0;
};

// One claim size distribution. The supported families cover light-tailed
// modelling needs: exponential (one parameter, its mean), gamma
// (shape/scale), and a deterministic point mass.
struct ClaimDistribution {
    enum class Kind {
        Exponential,
        Gamma,
        Deterministic,
    };

    Kind kind = Kind::Exponential;
    // Exponential: mean. Gamma: shape. Deterministic: value.
    double p1 = 1.0;
    // Gamma: scale. Unused otherwise.
    double p2 = 0.0;

    static ClaimDistribution exponential(double mean);
    static ClaimDistribution gamma(double shape, double scale);
    static ClaimDistribution deterministic(double value);
};

// First two moments of a claim distribution; variance is returned alongside
// the raw second moment because both appear in the approximations.
ClaimMoments claim_moments(const ClaimDistribution& dist);

// The environment: a continuous-time Markov chain on states 0..states-1
// given by its rate matrix. Off-diagonal entries are transition rates;
// each diagonal entry is minus its row's off-diagonal sum.
struct EnvironmentModel {
    int states = 0;
    std::vector<double> rates;  // row-major, states x states

    double rate(int from, int to) const { return rates[from * states + to]; }

    // Total exit rate of a state (minus the diagonal entry).
    double exit_rate(int state) const { return -rate(state, state); }
};

// The full risk model: m surplus processes sharing one environment.
// Component i earns premium premiums[i] per unit time; while the
// environment sits in state j, its claims arrive at rate
// arrival_rate(i, j) with sizes drawn from claim(i, j). Claim sizes,
// arrival times, and the environment path are independent across
// components given the environment.
struct RiskModel {
    EnvironmentModel environment;
    int components = 0;
    std::vector<double> premiums;              // size components
    std::vector<double> arrival_rates;         // components x states
    std::vector<ClaimDistribution> claims;     // components x states

    double arrival_rate(int component, int state) const {
        return arrival_rates[component * environment.states + state];
    }
    const ClaimDistribution& claim(int component, int state) const {
        return claims[component * environment.states + state];
    }
};

// What "ruin" means for a query:
//   AllComponents: every component ruined by the horizon.
//   AnyComponent:  at least one component ruined by the horizon.
//   Marginal:      one named component ruined by the horizon.
//   Subset:        every component in `subset` ruined by the horizon.
struct RuinQuery {
    enum class Mode {
        AllComponents,
        AnyComponent,
        Marginal,
        Subset,
    };

    Mode mode = Mode::AllComponents;
    std::vector<double> initial_capital;  // size components
    double horizon = 0.0;
    // Starting environment state, or -1 to draw it from the stationary law.
    int initial_state = 0;
    // Component index for Marginal mode.
    int marginal = 0;
    // Component indices for Subset mode (distinct, ascending preferred).
    std::vector<int> subset;
};

// One validation failure: a stable machine-readable code plus a human
// readable message naming the offending entry.
struct Violation {
    std::string code;
    std::string message;
};

// Structural checks on a model: positive dimensions, rate matrix shape and
// row sums, nonnegative off-diagonal rates, positive premiums, nonnegative
// arrival rates, and claim distribution parameter ranges. Returns every
// violation found, empty when the model is sound.
std::vector<Violation> validate(const RiskModel& model);

// Checks a query against a model: capital vector length, nonnegative
// capitals, positive horizon, state and component indices in range, subset
// entries distinct. Model violations are included first.
std::vector<Violation> validate(const RiskModel& model, const RuinQuery& query);

}  // namespace ruinlab::model
