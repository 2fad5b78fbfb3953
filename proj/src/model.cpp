#include "ruinlab/model.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace ruinlab::model {

namespace {

std::string entry_name(const char* what, int component, int state) {
    return std::string(what) + " for component " + std::to_string(component + 1) +
           " in state " + std::to_string(state + 1);
}

void check_claim(const ClaimDistribution& dist, int component, int state,
                 std::vector<Violation>& out) {
    switch (dist.kind) {
        case ClaimDistribution::Kind::Exponential:
            if (!(dist.p1 > 0.0)) {
                out.push_back({"claim-mean",
                               entry_name("exponential claim mean must be positive", component,
                                          state)});
            }
            break;
        case ClaimDistribution::Kind::Gamma:
            if (!(dist.p1 > 0.0) || !(dist.p2 > 0.0)) {
                out.push_back({"claim-gamma",
                               entry_name("gamma claim shape and scale must be positive",
                                          component, state)});
            }
            break;
        case ClaimDistribution::Kind::Deterministic:
            if (!(dist.p1 > 0.0)) {
                out.push_back({"claim-value",
                               entry_name("deterministic claim value must be positive",
                                          component, state)});
            }
            break;
    }
}

}  // namespace

ClaimDistribution ClaimDistribution::exponential(double mean) {
    ClaimDistribution d;
    d.kind = Kind::Exponential;
    d.p1 = mean;
    return d;
}

ClaimDistribution ClaimDistribution::gamma(double shape, double scale) {
    ClaimDistribution d;
    d.kind = Kind::Gamma;
    d.p1 = shape;
    d.p2 = scale;
    return d;
}

ClaimDistribution ClaimDistribution::deterministic(double value) {
    ClaimDistribution d;
    d.kind = Kind::Deterministic;
    d.p1 = value;
    return d;
}

ClaimMoments claim_moments(const ClaimDistribution& dist) {
    ClaimMoments m;
    switch (dist.kind) {
        case ClaimDistribution::Kind::Exponential:
            m.mean = dist.p1;
            m.variance = dist.p1 * dist.p1;
            m.second_moment = 2.0 * dist.p1 * dist.p1;
            break;
        case ClaimDistribution::Kind::Gamma:
            m.mean = dist.p1 * dist.p2;
            m.variance = dist.p1 * dist.p2 * dist.p2;
            m.second_moment = m.variance + m.mean * m.mean;
            break;
        case ClaimDistribution::Kind::Deterministic:
            m.mean = dist.p1;
            m.variance = 0.0;
            m.second_moment = dist.p1 * dist.p1;
            break;
    }
    return m;
}

std::vector<Violation> validate(const RiskModel& model) {
    std::vector<Violation> out;
    const int states = model.environment.states;
    if (states < 1) {
        out.push_back({"states", "environment needs at least one state"});
        return out;
    }
    if (model.environment.rates.size() != static_cast<std::size_t>(states) * states) {
        out.push_back({"rate-shape", "rate matrix must be states x states"});
        return out;
    }
    for (int j = 0; j < states; ++j) {
        double row_sum = 0.0;
        for (int k = 0; k < states; ++k) {
            const double q = model.environment.rate(j, k);
            if (!std::isfinite(q)) {
                out.push_back({"rate-finite",
                               "rate matrix entry (" + std::to_string(j + 1) + "," +
                                   std::to_string(k + 1) + ") is not finite"});
            } else if (j != k && q < 0.0) {
                out.push_back({"rate-sign",
                               "off-diagonal rate (" + std::to_string(j + 1) + "," +
                                   std::to_string(k + 1) + ") is negative"});
            }
            row_sum += q;
        }
        if (!(std::abs(row_sum) <= 1e-9)) {
            out.push_back({"row-sum",
                           "rate matrix row " + std::to_string(j + 1) +
                               " does not sum to zero"});
        }
    }
    if (model.components < 1) {
        out.push_back({"components", "model needs at least one component"});
        return out;
    }
    const std::size_t m = static_cast<std::size_t>(model.components);
    if (model.premiums.size() != m) {
        out.push_back({"premium-shape", "premiums must list one rate per component"});
        return out;
    }
    if (model.arrival_rates.size() != m * states || model.claims.size() != m * states) {
        out.push_back({"grid-shape",
                       "arrival rates and claim distributions must be components x states"});
        return out;
    }
    for (int i = 0; i < model.components; ++i) {
        if (!(model.premiums[i] > 0.0)) {
            out.push_back({"premium",
                           "premium for component " + std::to_string(i + 1) +
                               " must be positive"});
        }
        for (int j = 0; j < states; ++j) {
            const double lambda = model.arrival_rate(i, j);
            if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
                out.push_back({"arrival-rate",
                               entry_name("arrival rate must be nonnegative", i, j)});
            }
            check_claim(model.claim(i, j), i, j, out);
        }
    }
    return out;
}

std::vector<Violation> validate(const RiskModel& model, const RuinQuery& query) {
    std::vector<Violation> out = validate(model);
    if (query.initial_capital.size() != static_cast<std::size_t>(model.components)) {
        out.push_back({"capital-shape", "initial capital must list one value per component"});
    } else {
        for (int i = 0; i < model.components; ++i) {
            if (!(query.initial_capital[i] >= 0.0)) {
                out.push_back({"capital",
                               "initial capital of component " + std::to_string(i + 1) +
                                   " must be nonnegative"});
            }
        }
    }
    if (!(query.horizon > 0.0) || !std::isfinite(query.horizon)) {
        out.push_back({"horizon", "horizon must be positive and finite"});
    }
    if (query.initial_state != -1 &&
        (query.initial_state < 0 || query.initial_state >= model.environment.states)) {
        out.push_back({"initial-state", "initial state out of range"});
    }
    if (query.mode == RuinQuery::Mode::Marginal &&
        (query.marginal < 0 || query.marginal >= model.components)) {
        out.push_back({"marginal", "marginal component out of range"});
    }
    if (query.mode == RuinQuery::Mode::Subset) {
        if (query.subset.empty()) {
            out.push_back({"subset", "subset mode needs at least one component"});
        }
        std::vector<bool> seen(static_cast<std::size_t>(model.components > 0 ? model.components : 0),
                               false);
        for (int idx : query.subset) {
            if (idx < 0 || idx >= model.components) {
                out.push_back({"subset-range", "subset component out of range"});
            } else if (seen[static_cast<std::size_t>(idx)]) {
                out.push_back({"subset-distinct", "subset components must be distinct"});
            } else {
                seen[static_cast<std::size_t>(idx)] = true;
            }
        }
    }
    return out;
}

}  // namespace ruinlab::model
