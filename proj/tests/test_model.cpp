#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "ruinlab/model.hpp"
#include "support.hpp"

using namespace ruinlab;
using Catch::Matchers::WithinRel;

namespace {

bool has_code(const std::vector<model::Violation>& violations,
              const std::string& code) {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const model::Violation& v) { return v.code == code; });
}

}  // namespace

TEST_CASE("claim distribution factories fill the right slots", "[model]") {
    const auto exp = model::ClaimDistribution::exponential(2.5);
    CHECK(exp.kind == model::ClaimDistribution::Kind::Exponential);
    CHECK(exp.p1 == 2.5);

    const auto gamma = model::ClaimDistribution::gamma(3.0, 0.5);
    CHECK(gamma.kind == model::ClaimDistribution::Kind::Gamma);
    CHECK(gamma.p1 == 3.0);
    CHECK(gamma.p2 == 0.5);

    const auto point = model::ClaimDistribution::deterministic(4.0);
    CHECK(point.kind == model::ClaimDistribution::Kind::Deterministic);
    CHECK(point.p1 == 4.0);
}

TEST_CASE("claim moments match the closed forms", "[model]") {
    SECTION("exponential: mean mu, variance mu^2, second moment 2 mu^2") {
        const auto m =
            model::claim_moments(model::ClaimDistribution::exponential(2.0));
        CHECK_THAT(m.mean, WithinRel(2.0, 1e-15));
        CHECK_THAT(m.variance, WithinRel(4.0, 1e-15));
        CHECK_THAT(m.second_moment, WithinRel(8.0, 1e-15));
    }
    SECTION("gamma: mean k theta, variance k theta^2") {
        const auto m =
            model::claim_moments(model::ClaimDistribution::gamma(3.0, 0.5));
        CHECK_THAT(m.mean, WithinRel(1.5, 1e-15));
        CHECK_THAT(m.variance, WithinRel(0.75, 1e-15));
        CHECK_THAT(m.second_moment, WithinRel(3.0, 1e-15));
    }
    SECTION("deterministic: zero variance") {
        const auto m =
            model::claim_moments(model::ClaimDistribution::deterministic(4.0));
        CHECK_THAT(m.mean, WithinRel(4.0, 1e-15));
        CHECK(m.variance == 0.0);
        CHECK_THAT(m.second_moment, WithinRel(16.0, 1e-15));
    }
    SECTION("gamma(1, theta) coincides with exponential(theta)") {
        const auto g = model::claim_moments(model::ClaimDistribution::gamma(1.0, 1.7));
        const auto e =
            model::claim_moments(model::ClaimDistribution::exponential(1.7));
        CHECK_THAT(g.mean, WithinRel(e.mean, 1e-15));
        CHECK_THAT(g.second_moment, WithinRel(e.second_moment, 1e-15));
    }
}

TEST_CASE("a sound model validates cleanly", "[model]") {
    const model::RiskModel m = testsupport::two_line_model();
    CHECK(model::validate(m).empty());

    const model::RuinQuery q = testsupport::all_query({10.0, 10.0}, 50.0);
    CHECK(model::validate(m, q).empty());
}

TEST_CASE("model validation names structural defects", "[model]") {
    SECTION("empty environment") {
        model::RiskModel m;
        CHECK(has_code(model::validate(m), "states"));
    }
    SECTION("rate matrix shape") {
        model::RiskModel m = testsupport::two_line_model();
        m.environment.rates.pop_back();
        CHECK(has_code(model::validate(m), "rate-shape"));
    }
    SECTION("negative off-diagonal rate") {
        model::RiskModel m = testsupport::two_line_model();
        m.environment.rates = {-1.0, 1.0, -2.0, 2.0};
        CHECK(has_code(model::validate(m), "rate-sign"));
    }
    SECTION("row sums must vanish") {
        model::RiskModel m = testsupport::two_line_model();
        m.environment.rates[0] = -1.5;
        CHECK(has_code(model::validate(m), "row-sum"));
    }
    SECTION("nonpositive premium") {
        model::RiskModel m = testsupport::two_line_model();
        m.premiums[1] = 0.0;
        CHECK(has_code(model::validate(m), "premium"));
    }
    SECTION("negative arrival rate") {
        model::RiskModel m = testsupport::two_line_model();
        m.arrival_rates[2] = -0.1;
        CHECK(has_code(model::validate(m), "arrival-rate"));
    }
    SECTION("claim parameter ranges") {
        model::RiskModel m = testsupport::two_line_model();
        m.claims[0] = model::ClaimDistribution::exponential(0.0);
        CHECK(has_code(model::validate(m), "claim-mean"));
        m.claims[0] = model::ClaimDistribution::gamma(2.0, -1.0);
        CHECK(has_code(model::validate(m), "claim-gamma"));
        m.claims[0] = model::ClaimDistribution::deterministic(0.0);
        CHECK(has_code(model::validate(m), "claim-value"));
    }
    SECTION("zero arrival rate is legal: claims may simply never arrive") {
        model::RiskModel m = testsupport::two_line_model();
        m.arrival_rates[1] = 0.0;
        CHECK(model::validate(m).empty());
    }
}

TEST_CASE("query validation names defects", "[model]") {
    const model::RiskModel m = testsupport::two_line_model();

    SECTION("capital vector length") {
        const auto q = testsupport::all_query({10.0}, 50.0);
        CHECK(has_code(model::validate(m, q), "capital-shape"));
    }
    SECTION("negative capital") {
        const auto q = testsupport::all_query({10.0, -1.0}, 50.0);
        CHECK(has_code(model::validate(m, q), "capital"));
    }
    SECTION("nonpositive or infinite horizon") {
        auto q = testsupport::all_query({10.0, 10.0}, 0.0);
        CHECK(has_code(model::validate(m, q), "horizon"));
        q.horizon = std::numeric_limits<double>::infinity();
        CHECK(has_code(model::validate(m, q), "horizon"));
    }
    SECTION("initial state range, with -1 meaning stationary") {
        auto q = testsupport::all_query({10.0, 10.0}, 50.0);
        q.initial_state = 2;
        CHECK(has_code(model::validate(m, q), "initial-state"));
        q.initial_state = -1;
        CHECK(model::validate(m, q).empty());
    }
    SECTION("marginal component range") {
        auto q = testsupport::marginal_query({10.0, 10.0}, 50.0, 2);
        CHECK(has_code(model::validate(m, q), "marginal"));
    }
    SECTION("subset checks: empty, out of range, duplicates") {
        auto q = testsupport::all_query({10.0, 10.0}, 50.0);
        q.mode = model::RuinQuery::Mode::Subset;
        CHECK(has_code(model::validate(m, q), "subset"));
        q.subset = {0, 2};
        CHECK(has_code(model::validate(m, q), "subset-range"));
        q.subset = {1, 1};
        CHECK(has_code(model::validate(m, q), "subset-distinct"));
        q.subset = {0, 1};
        CHECK(model::validate(m, q).empty());
    }
}

TEST_CASE("accessors use row-major component-by-state layout", "[model]") {
    model::RiskModel m = testsupport::two_line_model();
    m.arrival_rates = {1.0, 2.0, 3.0, 4.0};
    CHECK(m.arrival_rate(0, 0) == 1.0);
    CHECK(m.arrival_rate(0, 1) == 2.0);
    CHECK(m.arrival_rate(1, 0) == 3.0);
    CHECK(m.arrival_rate(1, 1) == 4.0);
    CHECK(m.environment.rate(0, 1) == 1.0);
    CHECK(m.environment.exit_rate(1) == 2.0);
}
