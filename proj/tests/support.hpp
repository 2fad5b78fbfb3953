// Shared model builders for the test suites: the studied two-line parameter
// sets and a few reduced variants.
#pragma once

#include <vector>

#include "ruinlab/model.hpp"

namespace testsupport {

// Two identical lines of business in a two-state environment: a booming
// state with sparse claims (rate 0.45) and a recession with dense claims
// (rate 1.8), unit exponential claims, unit premiums. `rate_scale` slows or
// speeds the environment; `lambda_scale` thins or thickens the claim flow.
inline ruinlab::model::RiskModel two_line_model(double rate_scale = 1.0,
                                                double lambda_scale = 1.0) {
    using ruinlab::model::ClaimDistribution;
    ruinlab::model::RiskModel m;
    m.environment.states = 2;
    m.environment.rates = {-1.0 * rate_scale, 1.0 * rate_scale,
                           2.0 * rate_scale, -2.0 * rate_scale};
    m.components = 2;
    m.premiums = {1.0, 1.0};
    m.arrival_rates = {0.45 * lambda_scale, 1.8 * lambda_scale,
                       0.45 * lambda_scale, 1.8 * lambda_scale};
    m.claims.assign(4, ClaimDistribution::exponential(1.0));
    return m;
}

// One component, one environment state: a plain compound Poisson surplus
// with exponential claims.
inline ruinlab::model::RiskModel poisson_model(double lambda,
                                               double claim_mean = 1.0,
                                               double premium = 1.0) {
    using ruinlab::model::ClaimDistribution;
    ruinlab::model::RiskModel m;
    m.environment.states = 1;
    m.environment.rates = {0.0};
    m.components = 1;
    m.premiums = {premium};
    m.arrival_rates = {lambda};
    m.claims = {ClaimDistribution::exponential(claim_mean)};
    return m;
}

inline ruinlab::model::RuinQuery all_query(std::vector<double> capital,
                                           double horizon, int state = 0) {
    ruinlab::model::RuinQuery q;
    q.mode = ruinlab::model::RuinQuery::Mode::AllComponents;
    q.initial_capital = std::move(capital);
    q.horizon = horizon;
    q.initial_state = state;
    return q;
}

inline ruinlab::model::RuinQuery marginal_query(std::vector<double> capital,
                                                double horizon, int component,
                                                int state = 0) {
    ruinlab::model::RuinQuery q;
    q.mode = ruinlab::model::RuinQuery::Mode::Marginal;
    q.initial_capital = std::move(capital);
    q.horizon = horizon;
    q.initial_state = state;
    q.marginal = component;
    return q;
}

}  // namespace testsupport
