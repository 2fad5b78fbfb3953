// Single-switch approximation: condition on the environment switching at
// most once before the horizon, average the conditional ruin probabilities
// over the switch time and target state, and renormalize by the probability
// of seeing at most one switch. Strong when the environment moves slowly.
#pragma once

#include <vector>

#include "ruinlab/model.hpp"

namespace ruinlab::switching {

// Tolerances shared by every quadrature this module performs (the switch
// time integral, the surplus-level integral, and the closed-form theta
// integral).
struct QuadratureConfig {
    double rel_tol = 1e-6;
    double abs_tol = 1e-10;
    int max_subdivisions = 200;
};

// One conditioned environment history: state `from_state` on [0, switch_time],
// then `to_state` on (switch_time, horizon]. switch_time == horizon encodes
// the no-switch history, where `to_state` is irrelevant.
struct SwitchScenario {
    int from_state = 0;
    int to_state = 0;
    double switch_time = 0.0;
    double horizon = 0.0;
};

// Time-averaged arrival intensity over a switch scenario:
// (rate_before * switch_time + rate_after * (horizon - switch_time)) / horizon.
double lambda_star(double rate_before, double rate_after, double switch_time,
                   double horizon);

// Finite-horizon ruin probability of a compound-Poisson surplus with
// exponential claims of mean `claim_mean`, arrival intensity `intensity`
// (use lambda_star for a switch scenario), premium rate `premium` and
// initial capital u, evaluated by the closed-form theta integral.
// Requires premium > 0 (std::invalid_argument otherwise); throws
// std::runtime_error if the quadrature fails to converge or the raw result
// leaves [0 - 1e-8, 1 + 1e-8], then clamps to [0, 1].
double exp_single_switch_ruin(double u, double horizon, double intensity,
                              double claim_mean, double premium,
                              const QuadratureConfig& quad = {});

// Density correction accounting for conditioning on survival up to the
// switch time, in the Brownian approximation of one surplus segment with
// the given drift and variance per unit time: the ratio between the
// survival-conditioned density of the surplus level v at the switch time
// and the unconditioned Gaussian density. Returns 0 for v < 0. Throws
// std::domain_error when the segment's survival probability underflows
// (the conditioning event is essentially impossible).
double bm_scaling_factor(double v, double u, double switch_time, double drift,
                         double variance);

// Single-switch ruin probability of one component by conditioning on the
// surplus level at the switch time: ruin before the switch, plus survival
// times the average ruin probability after it, integrated against the
// survival-conditioned surplus density. Each segment's ruin probability is
// the exponential closed form when the occupied state's claims are
// exponential and the premium is positive, and otherwise a Brownian
// approximation with moment-matched drift r - lambda * mean and variance
// lambda * (variance + mean^2). The conditional surplus density is always
// the Brownian one: bm_scaling_factor times the moment-matched normal
// density, renormalized on (0, inf).
double general_single_switch_ruin(const model::RiskModel& model, int component,
                                  double initial_capital,
                                  const SwitchScenario& scenario,
                                  const QuadratureConfig& quad = {});

// Single-switch ruin probability of one component under the model, routed
// to the closed form when the claims in both scenario states are
// exponential with equal means and the premium is positive, and to the
// Brownian-segment form otherwise.
double single_switch_component_ruin(const model::RiskModel& model,
                                    int component, double initial_capital,
                                    const SwitchScenario& scenario,
                                    const QuadratureConfig& quad = {});

// The full approximation for a query: conditional on at most one switch
// from the query's initial state, components ruin independently, so the
// query combiner (product for all/subset, complement-product for any,
// single factor for marginal) applies inside the switch-time integral.
// The initial state must be explicit (stationary initialization does not
// mix with conditioning on the first switch). Throws on validation
// failures and propagates quadrature failures.
double chi(const model::RiskModel& model, const model::RuinQuery& query,
           const QuadratureConfig& quad = {});

}  // namespace ruinlab::switching
