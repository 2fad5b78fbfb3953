#include "ruinlab/switching.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "ruinlab/diffusion.hpp"
#include "ruinlab/markov.hpp"
#include "ruinlab/numerics.hpp"

namespace ruinlab::switching {

namespace {

// Slack allowed around [0, 1] before a closed-form evaluation is treated as
// a numerical failure instead of being clamped.
constexpr double kRangeSlack = 1e-8;

// Survival probabilities smaller than this make conditioning on survival
// meaningless in double precision.
constexpr double kSurvivalFloor = 1e-300;

void require_valid(const model::RiskModel& model, const model::RuinQuery& query,
                   const char* where) {
    const std::vector<model::Violation> violations = model::validate(model, query);
    if (!violations.empty()) {
        throw std::invalid_argument(std::string(where) + ": " +
                                    violations.front().message);
    }
}

void require_scenario(const model::RiskModel& model, int component,
                      const SwitchScenario& scenario, const char* where) {
    if (component < 0 || component >= model.components) {
        throw std::invalid_argument(std::string(where) +
                                    ": component index out of range");
    }
    if (scenario.from_state < 0 || scenario.from_state >= model.environment.states ||
        scenario.to_state < 0 || scenario.to_state >= model.environment.states) {
        throw std::invalid_argument(std::string(where) +
                                    ": scenario state out of range");
    }
    if (!(scenario.horizon > 0.0) || !(scenario.switch_time > 0.0) ||
        scenario.switch_time > scenario.horizon) {
        throw std::invalid_argument(
            std::string(where) +
            ": needs 0 < switch_time <= horizon and horizon > 0");
    }
}

// Coefficients of the closed-form theta integral for a constant-intensity
// segment: the integrand is front * exp(cos_coef * cos(theta) + const_exp)
// * f2(theta) / f3(theta) on (0, pi). peak_log bounds the integrand's
// exponent (attained at theta = 0), which decides below whether double
// precision can cancel the integral accurately.
struct ThetaCoefficients {
    double rho = 0.0;
    double amp = 0.0;
    double cos_coef = 0.0;
    double const_exp = 0.0;
    double front = 0.0;

    double peak_log() const { return cos_coef + const_exp; }
};

ThetaCoefficients theta_coefficients(double u, double horizon, double lam,
                                     double mu, double r) {
    ThetaCoefficients c;
    c.rho = std::sqrt(lam * mu / r);
    c.amp = u * std::sqrt(lam / (r * mu));
    c.cos_coef = 2.0 * horizon * std::sqrt(r * lam / mu) + (u / mu) * c.rho;
    c.const_exp = -(r / mu + lam) * horizon - u / mu;
    c.front = lam * mu / r;
    return c;
}

// Largest integrand exponent at which the closed form is still evaluated:
// the theta integral cancels terms of magnitude exp(peak_log) down to a
// value in [0, pi], so roundoff noise is about exp(peak_log) * 1e-16 and
// must stay well below the 1e-8 failure band.
constexpr double kClosedFormMaxPeakLog = 8.0;

// Finite-horizon ruin probability of one component while the environment
// sits in a single state: the exponential closed form when it applies and
// is numerically evaluable, a moment-matched Brownian approximation
// otherwise. A large integrand peak happens either deep in the no-ruin or
// certain-ruin extremes (where the two routes agree to within the noise)
// or at claim counts large enough that the Brownian value is accurate, so
// routing away loses nothing measurable.
double segment_ruin(const model::RiskModel& model, int component, int state,
                    double capital, double length,
                    const QuadratureConfig& quad) {
    if (length == 0.0) {
        return capital < 0.0 ? 1.0 : 0.0;
    }
    const double premium = model.premiums[component];
    const double rate = model.arrival_rate(component, state);
    const model::ClaimDistribution& claims = model.claim(component, state);
    if (claims.kind == model::ClaimDistribution::Kind::Exponential &&
        premium > 0.0) {
        const bool trivial = capital < 0.0 || rate == 0.0;
        if (trivial ||
            theta_coefficients(capital, length, rate, claims.p1, premium)
                    .peak_log() <= kClosedFormMaxPeakLog) {
            return exp_single_switch_ruin(capital, length, rate, claims.p1,
                                          premium, quad);
        }
    }
    const model::ClaimMoments moments = model::claim_moments(claims);
    return diffusion::univariate_bm_ruin(capital, premium - rate * moments.mean,
                                         rate * moments.second_moment, length);
}

}  // namespace

double lambda_star(double rate_before, double rate_after, double switch_time,
                   double horizon) {
    if (!(horizon > 0.0) || !(switch_time >= 0.0) || switch_time > horizon) {
        throw std::invalid_argument(
            "lambda_star: needs 0 <= switch_time <= horizon and horizon > 0");
    }
    return (rate_before * switch_time + rate_after * (horizon - switch_time)) /
           horizon;
}

double exp_single_switch_ruin(double u, double horizon, double intensity,
                              double claim_mean, double premium,
                              const QuadratureConfig& quad) {
    if (!(premium > 0.0)) {
        throw std::invalid_argument(
            "exp_single_switch_ruin: premium must be positive");
    }
    if (!(claim_mean > 0.0)) {
        throw std::invalid_argument(
            "exp_single_switch_ruin: claim mean must be positive");
    }
    if (!(horizon > 0.0)) {
        throw std::invalid_argument(
            "exp_single_switch_ruin: horizon must be positive");
    }
    if (!(intensity >= 0.0)) {
        throw std::invalid_argument(
            "exp_single_switch_ruin: intensity must be nonnegative");
    }
    if (u < 0.0) {
        return 1.0;
    }
    if (intensity == 0.0) {
        return 0.0;
    }

    const double lam = intensity;
    const double mu = claim_mean;
    const double r = premium;

    // rho < 1 exactly when the premium outruns the mean claim flow; it also
    // controls which branch carries the boundary term below.
    const ThetaCoefficients coef =
        theta_coefficients(u, horizon, lam, mu, r);
    const double rho = coef.rho;
    const double front = coef.front;

    auto integrand = [&](double theta) {
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const double f1 = front * std::exp(coef.cos_coef * c + coef.const_exp);
        const double f2 = 2.0 * s * std::sin(coef.amp * s + theta);
        const double half = std::sin(0.5 * theta);
        const double f3 = (1.0 - rho) * (1.0 - rho) + 4.0 * rho * half * half;
        return f1 * f2 / f3;
    };
    const numerics::QuadratureResult q = numerics::adaptive_quadrature(
        integrand, 0.0, std::numbers::pi, quad.rel_tol, quad.abs_tol,
        quad.max_subdivisions);
    if (!q.converged) {
        throw std::runtime_error(
            "exp_single_switch_ruin: theta quadrature did not converge");
    }

    const double correction = q.value / std::numbers::pi;
    double raw;
    if (r > lam * mu) {
        raw = front * std::exp(-(1.0 / mu - lam / r) * u) - correction;
    } else {
        raw = 1.0 - correction;
    }
    if (!(raw >= -kRangeSlack) || !(raw <= 1.0 + kRangeSlack)) {
        throw std::runtime_error(
            "exp_single_switch_ruin: evaluation left [0, 1] beyond tolerance");
    }
    return std::clamp(raw, 0.0, 1.0);
}

double bm_scaling_factor(double v, double u, double switch_time, double drift,
                         double variance) {
    if (!(switch_time > 0.0) || !(variance > 0.0)) {
        throw std::domain_error(
            "bm_scaling_factor: needs positive switch time and variance");
    }
    if (v < 0.0) {
        return 0.0;
    }
    const double survival =
        1.0 - diffusion::univariate_bm_ruin(u, drift, variance, switch_time);
    if (survival < kSurvivalFloor) {
        throw std::domain_error(
            "bm_scaling_factor: survival through the segment is essentially "
            "impossible, conditioning on it is meaningless");
    }
    const double crossing =
        -std::expm1(-4.0 * u * (u + v) / (2.0 * variance * switch_time));
    return crossing / survival;
}

double general_single_switch_ruin(const model::RiskModel& model, int component,
                                  double initial_capital,
                                  const SwitchScenario& scenario,
                                  const QuadratureConfig& quad) {
    require_scenario(model, component, scenario, "general_single_switch_ruin");
    const double u = initial_capital;
    const double T = scenario.horizon;
    const double tau = scenario.switch_time;
    if (u <= 0.0) {
        // The conditioning density below is Brownian, and a Brownian path
        // started on the barrier is condemned; callers wanting the exact
        // boundary value at u = 0 use the closed form directly.
        return 1.0;
    }
    if (tau == T) {
        return segment_ruin(model, component, scenario.from_state, u, T, quad);
    }

    const double ruin_before =
        segment_ruin(model, component, scenario.from_state, u, tau, quad);
    if (ruin_before >= 1.0) {
        return 1.0;
    }
    const double remaining = T - tau;

    // Moment-matched Brownian coefficients of the first segment, used for
    // the survival-conditioned surplus density at the switch time.
    const double premium = model.premiums[component];
    const double rate_before =
        model.arrival_rate(component, scenario.from_state);
    const model::ClaimMoments mom_before =
        model::claim_moments(model.claim(component, scenario.from_state));
    const double drift_before = premium - rate_before * mom_before.mean;
    const double variance_before = rate_before * mom_before.second_moment;

    double ruin_after;
    if (variance_before == 0.0) {
        // The first segment sees no claims; surviving it pins the surplus.
        const double v = u + drift_before * tau;
        ruin_after = segment_ruin(model, component, scenario.to_state, v,
                                  remaining, quad);
    } else {
        // Average the second segment's ruin probability over the
        // survival-conditioned surplus level at the switch time. The weight
        // is renormalized on (0, inf) so approximation error in the
        // conditioning correction cannot leak probability mass.
        const double mean = u + drift_before * tau;
        const double sd = std::sqrt(variance_before * tau);
        const double upper = std::max(mean, 0.0) + 12.0 * sd;
        auto weight = [&](double v) {
            return bm_scaling_factor(v, u, tau, drift_before, variance_before) *
                   numerics::normal_pdf((v - mean) / sd) / sd;
        };
        auto weighted_ruin = [&](double v) {
            return weight(v) * segment_ruin(model, component,
                                            scenario.to_state, v, remaining,
                                            quad);
        };
        const numerics::QuadratureResult mass = numerics::adaptive_quadrature(
            weight, 0.0, upper, quad.rel_tol, quad.abs_tol,
            quad.max_subdivisions);
        if (!mass.converged) {
            throw std::runtime_error(
                "general_single_switch_ruin: surplus-level quadrature did not "
                "converge");
        }
        const numerics::QuadratureResult ruin = numerics::adaptive_quadrature(
            weighted_ruin, 0.0, upper, quad.rel_tol, quad.abs_tol,
            quad.max_subdivisions);
        if (!ruin.converged) {
            throw std::runtime_error(
                "general_single_switch_ruin: surplus-level quadrature did not "
                "converge");
        }
        if (!(mass.value > 0.0)) {
            throw std::runtime_error(
                "general_single_switch_ruin: conditioned surplus density has "
                "no mass on the positive axis");
        }
        ruin_after = std::clamp(ruin.value / mass.value, 0.0, 1.0);
    }
    return ruin_before + (1.0 - ruin_before) * ruin_after;
}

double single_switch_component_ruin(const model::RiskModel& model,
                                    int component, double initial_capital,
                                    const SwitchScenario& scenario,
                                    const QuadratureConfig& quad) {
    require_scenario(model, component, scenario,
                     "single_switch_component_ruin");
    const double premium = model.premiums[component];
    const model::ClaimDistribution& before =
        model.claim(component, scenario.from_state);
    const model::ClaimDistribution& after =
        model.claim(component, scenario.to_state);

    const bool closed_form =
        before.kind == model::ClaimDistribution::Kind::Exponential &&
        after.kind == model::ClaimDistribution::Kind::Exponential &&
        before.p1 == after.p1 && premium > 0.0;
    if (closed_form) {
        const double star = lambda_star(
            model.arrival_rate(component, scenario.from_state),
            model.arrival_rate(component, scenario.to_state),
            scenario.switch_time, scenario.horizon);
        const bool trivial = initial_capital < 0.0 || star == 0.0;
        if (trivial ||
            theta_coefficients(initial_capital, scenario.horizon, star,
                               before.p1, premium)
                    .peak_log() <= kClosedFormMaxPeakLog) {
            return exp_single_switch_ruin(initial_capital, scenario.horizon,
                                          star, before.p1, premium, quad);
        }
    }
    return general_single_switch_ruin(model, component, initial_capital,
                                      scenario, quad);
}

double chi(const model::RiskModel& model, const model::RuinQuery& query,
           const QuadratureConfig& quad) {
    require_valid(model, query, "chi");
    if (query.initial_state < 0) {
        throw std::invalid_argument(
            "chi: needs an explicit initial state, conditioning on the first "
            "switch does not mix with a stationary start");
    }
    const int j = query.initial_state;
    const double T = query.horizon;
    const model::EnvironmentModel& env = model.environment;
    const double qj = env.exit_rate(j);

    auto component_ruin = [&](int i, const SwitchScenario& scenario) {
        return single_switch_component_ruin(model, i, query.initial_capital[i],
                                            scenario, quad);
    };
    // Conditional on the environment history, components ruin independently,
    // so the query combiner applies directly to the per-component values.
    auto combine = [&](const SwitchScenario& scenario) {
        switch (query.mode) {
            case model::RuinQuery::Mode::Marginal:
                return component_ruin(query.marginal, scenario);
            case model::RuinQuery::Mode::AnyComponent: {
                double survive_all = 1.0;
                for (int i = 0; i < model.components; ++i) {
                    survive_all *= 1.0 - component_ruin(i, scenario);
                }
                return 1.0 - survive_all;
            }
            case model::RuinQuery::Mode::AllComponents: {
                double product = 1.0;
                for (int i = 0; i < model.components; ++i) {
                    product *= component_ruin(i, scenario);
                }
                return product;
            }
            case model::RuinQuery::Mode::Subset:
                break;
        }
        double product = 1.0;
        for (int i : query.subset) {
            product *= component_ruin(i, scenario);
        }
        return product;
    };

    // No-switch history: state j all the way to the horizon.
    const SwitchScenario stay{j, j, T, T};
    double total = combine(stay) * std::exp(-qj * T);

    for (int k = 0; k < env.states; ++k) {
        if (k == j) {
            continue;
        }
        const double qjk = env.rate(j, k);
        if (!(qjk > 0.0)) {
            continue;
        }
        const double qk = env.exit_rate(k);
        auto integrand = [&](double tau) {
            const SwitchScenario scenario{j, k, tau, T};
            return combine(scenario) * qjk *
                   std::exp(-qj * tau - qk * (T - tau));
        };
        const numerics::QuadratureResult part = numerics::adaptive_quadrature(
            integrand, 0.0, T, quad.rel_tol, quad.abs_tol,
            quad.max_subdivisions);
        if (!part.converged) {
            throw std::runtime_error(
                "chi: switch-time quadrature did not converge");
        }
        total += part.value;
    }

    const double normalizer = markov::at_most_one_switch_probability(env, j, T);
    return std::clamp(total / normalizer, 0.0, 1.0);
}

}  // namespace ruinlab::switching
