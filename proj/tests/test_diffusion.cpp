#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ruinlab/diffusion.hpp"
#include "ruinlab/model.hpp"
#include "ruinlab/numerics.hpp"
#include "support.hpp"

#include "data/bm_survival_reference.inc"

using namespace ruinlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

model::RiskModel flat_model(int components, std::vector<double> lambdas) {
    model::RiskModel m;
    m.environment.states = 1;
    m.environment.rates = {0.0};
    m.components = components;
    m.premiums.assign(static_cast<std::size_t>(components), 1.0);
    m.arrival_rates = std::move(lambdas);
    for (int i = 0; i < components; ++i) {
        m.claims.push_back(model::ClaimDistribution::exponential(1.0));
    }
    return m;
}

// Deterministic random valid models for the covariance sweep: 2-4 states,
// 2-3 components, mixed claim families.
model::RiskModel random_model(std::uint64_t salt) {
    numerics::RngStream rng(5150, salt);
    model::RiskModel m;
    const int states = 2 + static_cast<int>(rng.next_u64() % 3);
    const int comps = 2 + static_cast<int>(rng.next_u64() % 2);
    m.environment.states = states;
    m.environment.rates.assign(
        static_cast<std::size_t>(states) * states, 0.0);
    for (int j = 0; j < states; ++j) {
        double row = 0.0;
        for (int k = 0; k < states; ++k) {
            if (k == j) {
                continue;
            }
            const double q = 0.2 + 2.0 * rng.next_uniform();
            m.environment.rates[static_cast<std::size_t>(j) * states + k] = q;
            row += q;
        }
        m.environment.rates[static_cast<std::size_t>(j) * states + j] = -row;
    }
    m.components = comps;
    for (int i = 0; i < comps; ++i) {
        m.premiums.push_back(0.5 + 2.0 * rng.next_uniform());
    }
    for (int i = 0; i < comps; ++i) {
        for (int j = 0; j < states; ++j) {
            m.arrival_rates.push_back(0.1 + 1.9 * rng.next_uniform());
            const double mean = 0.5 + 1.5 * rng.next_uniform();
            switch (rng.next_u64() % 3) {
                case 0:
                    m.claims.push_back(
                        model::ClaimDistribution::exponential(mean));
                    break;
                case 1:
                    m.claims.push_back(
                        model::ClaimDistribution::gamma(2.0, mean / 2.0));
                    break;
                default:
                    m.claims.push_back(
                        model::ClaimDistribution::deterministic(mean));
                    break;
            }
        }
    }
    return m;
}

double entry(const std::vector<double>& mat, int m, int i, int j) {
    return mat[static_cast<std::size_t>(i) * m + j];
}

}  // namespace

TEST_CASE("stationary-averaged moment rates") {
    SECTION("two-line base book") {
        const auto mom =
            diffusion::asymptotic_moments(testsupport::two_line_model());
        REQUIRE(mom.components == 2);
        for (int i = 0; i < 2; ++i) {
            CHECK_THAT(mom.mean_claim_rate[i], WithinRel(0.9, 1e-12));
            CHECK_THAT(mom.second_moment_rate[i], WithinRel(1.8, 1e-12));
            CHECK_THAT(mom.variance_rate[i], WithinRel(0.9, 1e-12));
            for (int k = 0; k < 2; ++k) {
                CHECK_THAT(entry(mom.cross, 2, i, k), WithinRel(0.27, 1e-12));
            }
        }
    }
    SECTION("an unmodulated book has no cross term") {
        const auto mom =
            diffusion::asymptotic_moments(testsupport::poisson_model(1.0));
        REQUIRE(mom.components == 1);
        CHECK_THAT(mom.mean_claim_rate[0], WithinRel(1.0, 1e-12));
        CHECK(entry(mom.cross, 1, 0, 0) == 0.0);
    }
    SECTION("slowing the environment scales the cross term inversely") {
        const auto mom = diffusion::asymptotic_moments(
            testsupport::two_line_model(1.0 / 64.0));
        CHECK_THAT(entry(mom.cross, 2, 0, 1), WithinRel(0.27 * 64.0, 1e-12));
    }
    SECTION("thinning arrivals scales the cross term quadratically") {
        const auto mom = diffusion::asymptotic_moments(
            testsupport::two_line_model(1.0, 0.8));
        CHECK_THAT(mom.mean_claim_rate[0], WithinRel(0.72, 1e-12));
        CHECK_THAT(entry(mom.cross, 2, 0, 1), WithinRel(0.1728, 1e-12));
    }
}

TEST_CASE("limit covariance assembly") {
    const model::RiskModel base = testsupport::two_line_model();
    const auto mom = diffusion::asymptotic_moments(base);

    SECTION("combined regime keeps claim and modulation noise") {
        const auto spec = diffusion::covariance(mom, base);
        REQUIRE(spec.components == 2);
        CHECK_THAT(spec.drift[0], WithinRel(0.1, 1e-12));
        CHECK_THAT(spec.drift[1], WithinRel(0.1, 1e-12));
        CHECK_THAT(entry(spec.covariance, 2, 0, 0), WithinRel(2.07, 1e-12));
        CHECK_THAT(entry(spec.covariance, 2, 1, 1), WithinRel(2.07, 1e-12));
        CHECK_THAT(entry(spec.covariance, 2, 0, 1), WithinRel(0.27, 1e-12));
        const double corr = entry(spec.covariance, 2, 0, 1) /
                            entry(spec.covariance, 2, 0, 0);
        CHECK_THAT(corr, WithinRel(0.13043478260869565, 1e-12));
        CHECK_FALSE(spec.symmetrized);
    }
    SECTION("claim-noise regime is diagonal") {
        const auto spec = diffusion::covariance(
            mom, base, diffusion::CovarianceRegime::ClaimNoise);
        CHECK_THAT(entry(spec.covariance, 2, 0, 0), WithinRel(1.8, 1e-12));
        CHECK(entry(spec.covariance, 2, 0, 1) == 0.0);
    }
    SECTION("modulation-noise regime keeps only the cross matrix") {
        const auto spec = diffusion::covariance(
            mom, base, diffusion::CovarianceRegime::ModulationNoise);
        CHECK_THAT(entry(spec.covariance, 2, 0, 0), WithinRel(0.27, 1e-12));
        CHECK_THAT(entry(spec.covariance, 2, 0, 1), WithinRel(0.27, 1e-12));
    }
    SECTION("a slow environment dominates the covariance") {
        const model::RiskModel slow = testsupport::two_line_model(1.0 / 64.0);
        const auto spec =
            diffusion::covariance(diffusion::asymptotic_moments(slow), slow);
        CHECK_THAT(entry(spec.covariance, 2, 0, 0), WithinRel(19.08, 1e-12));
        CHECK_THAT(entry(spec.covariance, 2, 0, 1), WithinRel(17.28, 1e-12));
        const double corr = 17.28 / 19.08;
        CHECK_THAT(entry(spec.covariance, 2, 0, 1) /
                       entry(spec.covariance, 2, 0, 0),
                   WithinRel(corr, 1e-12));
    }
    SECTION("random valid models always produce admissible covariances") {
        for (std::uint64_t salt = 0; salt < 100; ++salt) {
            const model::RiskModel m = random_model(salt);
            REQUIRE(model::validate(m).empty());
            const auto spec =
                diffusion::covariance(diffusion::asymptotic_moments(m), m);
            const int n = spec.components;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    CHECK(entry(spec.covariance, n, i, j) ==
                          entry(spec.covariance, n, j, i));
                }
                CHECK(entry(spec.covariance, n, i, i) >= 0.0);
            }
        }
    }
}

TEST_CASE("univariate Brownian ruin") {
    SECTION("zero or negative reserve is immediate ruin") {
        CHECK(diffusion::univariate_bm_ruin(0.0, 0.1, 2.0, 50.0) == 1.0);
        CHECK(diffusion::univariate_bm_ruin(-3.0, 0.1, 2.0, 50.0) == 1.0);
    }
    SECTION("driftless ruin reduces to the reflection principle") {
        const double variance = 2.07;
        const double horizon = 50.0;
        const double u = std::sqrt(variance * horizon);
        CHECK_THAT(diffusion::univariate_bm_ruin(u, 0.0, variance, horizon),
                   WithinRel(2.0 * numerics::normal_cdf(-1.0), 1e-12));
    }
    SECTION("long horizons approach the ultimate-ruin exponential") {
        const double u = 5.0;
        const double drift = 0.1;
        const double variance = 2.0;
        const double ultimate = std::exp(-2.0 * drift * u / variance);
        const double value =
            diffusion::univariate_bm_ruin(u, drift, variance, 1e8);
        CHECK(value <= ultimate * (1.0 + 1e-12));
        CHECK_THAT(value, WithinRel(ultimate, 1e-9));
    }
    SECTION("zero variance degenerates to the deterministic path") {
        CHECK(diffusion::univariate_bm_ruin(1.0, -0.5, 0.0, 4.0) == 1.0);
        CHECK(diffusion::univariate_bm_ruin(1.0, -0.5, 0.0, 1.0) == 0.0);
        CHECK(diffusion::univariate_bm_ruin(1.0, 0.5, 0.0, 9.0) == 0.0);
    }
    SECTION("monotone in reserve and in horizon, bounded in [0,1]") {
        double prev = 1.0;
        for (double u = 0.0; u <= 10.0; u += 1.0) {
            const double v = diffusion::univariate_bm_ruin(u, 0.1, 2.07, 50.0);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
        prev = 0.0;
        for (double horizon = 1.0; horizon <= 101.0; horizon += 10.0) {
            const double v =
                diffusion::univariate_bm_ruin(5.0, 0.1, 2.07, horizon);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("bivariate Brownian joint survival") {
    SECTION("matches the reference table") {
        for (const auto& row : kBmSurvivalReference) {
            INFO("rho=" << row.rho << " u=(" << row.u1 << "," << row.u2
                        << ")");
            const double cov12 = row.rho * std::sqrt(row.s11 * row.s22);
            const double got = diffusion::bivariate_bm_joint_survival(
                row.u1, row.u2, row.g1, row.g2, row.s11, row.s22, cov12,
                row.T, 1e-8, 1e-12, 400);
            CHECK_THAT(got, WithinRel(row.survival, 1e-6));
        }
    }
    SECTION("zero correlation factorizes") {
        const double s1 =
            1.0 - diffusion::univariate_bm_ruin(10.0, 0.1, 2.07, 50.0);
        const double s2 =
            1.0 - diffusion::univariate_bm_ruin(8.0, 0.05, 1.5, 50.0);
        const double joint = diffusion::bivariate_bm_joint_survival(
            10.0, 8.0, 0.1, 0.05, 2.07, 1.5, 0.0, 50.0);
        CHECK_THAT(joint, WithinAbs(s1 * s2, 1e-6));
    }
    SECTION("an unreachable barrier reduces to one component") {
        const double horizon = 50.0;
        const double faraway = 50.0 * std::sqrt(2.07 * horizon);
        const double s2 =
            1.0 - diffusion::univariate_bm_ruin(10.0, 0.1, 2.07, horizon);
        const double joint = diffusion::bivariate_bm_joint_survival(
            faraway, 10.0, 0.1, 0.1, 2.07, 2.07, 0.27, horizon);
        CHECK_THAT(joint, WithinAbs(s2, 1e-6));
    }
    SECTION("correlation orders joint survival") {
        double prev = 0.0;
        for (double rho : {-0.5, 0.0, 0.13, 0.5, 0.9}) {
            const double joint = diffusion::bivariate_bm_joint_survival(
                10.0, 10.0, 0.1, 0.1, 2.07, 2.07, rho * 2.07, 50.0);
            CHECK(joint >= prev - 1e-9);
            prev = joint;
        }
    }
    SECTION("joint survival respects the Frechet bounds") {
        const double pairs[][2] = {{2.0, 8.0}, {10.0, 10.0}};
        const double drifts[][2] = {{0.1, 0.1}, {-0.05, 0.2}};
        for (const auto& u : pairs) {
            for (const auto& g : drifts) {
                for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
                    INFO("u=(" << u[0] << "," << u[1] << ") g=(" << g[0]
                               << "," << g[1] << ") rho=" << rho);
                    const double s1 = 1.0 - diffusion::univariate_bm_ruin(
                                                u[0], g[0], 2.0, 30.0);
                    const double s2 = 1.0 - diffusion::univariate_bm_ruin(
                                                u[1], g[1], 2.0, 30.0);
                    const double joint =
                        diffusion::bivariate_bm_joint_survival(
                            u[0], u[1], g[0], g[1], 2.0, 2.0, rho * 2.0,
                            30.0);
                    CHECK(joint >= std::max(0.0, s1 + s2 - 1.0) - 1e-6);
                    CHECK(joint <= std::min(s1, s2) + 1e-6);
                }
            }
        }
    }
    SECTION("degenerate correlation is rejected") {
        CHECK_THROWS_AS(
            diffusion::bivariate_bm_joint_survival(5.0, 5.0, 0.1, 0.1, 1.0,
                                                   1.0, 1.0 - 1e-12, 10.0),
            std::domain_error);
        CHECK_THROWS_AS(
            diffusion::bivariate_bm_joint_survival(5.0, 5.0, 0.1, 0.1, 1.0,
                                                   1.0, -(1.0 - 1e-12), 10.0),
            std::domain_error);
    }
}

TEST_CASE("multivariate diffusion approximation") {
    const model::RiskModel base = testsupport::two_line_model();

    SECTION("one component reduces to the univariate formula") {
        const model::RiskModel m = testsupport::poisson_model(0.9);
        const auto est = diffusion::multivariate_ruin_diffusion(
            m, testsupport::all_query({10.0}, 50.0, 0));
        const auto mom = diffusion::asymptotic_moments(m);
        const auto spec = diffusion::covariance(mom, m);
        const double direct = diffusion::univariate_bm_ruin(
            10.0, spec.drift[0], spec.covariance[0], 50.0);
        CHECK_THAT(est.value, WithinRel(direct, 1e-12));
        CHECK_FALSE(est.approximate);
    }
    SECTION("marginal mode is the univariate formula on one line") {
        const auto est = diffusion::multivariate_ruin_diffusion(
            base, testsupport::marginal_query({10.0, 10.0}, 50.0, 0, 1));
        const double direct =
            diffusion::univariate_bm_ruin(10.0, 0.1, 2.07, 50.0);
        CHECK_THAT(est.value, WithinRel(direct, 1e-10));
    }
    SECTION("two components assemble by inclusion-exclusion") {
        const auto est = diffusion::multivariate_ruin_diffusion(
            base, testsupport::all_query({10.0, 10.0}, 50.0, 1));
        const double s1 =
            1.0 - diffusion::univariate_bm_ruin(10.0, 0.1, 2.07, 50.0);
        const double joint = diffusion::bivariate_bm_joint_survival(
            10.0, 10.0, 0.1, 0.1, 2.07, 2.07, 0.27, 50.0);
        const double direct = 1.0 - 2.0 * s1 + joint;
        CHECK_THAT(est.value, WithinAbs(direct, 1e-8));
        CHECK_FALSE(est.approximate);
    }
    SECTION("any-component mode complements the joint survival") {
        model::RuinQuery q = testsupport::all_query({10.0, 10.0}, 50.0, 1);
        q.mode = model::RuinQuery::Mode::AnyComponent;
        const auto est = diffusion::multivariate_ruin_diffusion(base, q);
        const double joint = diffusion::bivariate_bm_joint_survival(
            10.0, 10.0, 0.1, 0.1, 2.07, 2.07, 0.27, 50.0);
        CHECK_THAT(est.value, WithinAbs(1.0 - joint, 1e-8));
    }
    SECTION("three or more components report the pairwise correction") {
        const model::RiskModel m = flat_model(3, {0.5, 0.7, 0.9});
        const auto est = diffusion::multivariate_ruin_diffusion(
            m, testsupport::all_query({4.0, 4.0, 4.0}, 30.0, 0));
        CHECK(est.approximate);
        CHECK(est.value >= 0.0);
        CHECK(est.value <= 1.0);
    }
    SECTION("joint queries beyond twelve components are refused") {
        const int m = 13;
        const model::RiskModel big =
            flat_model(m, std::vector<double>(m, 0.5));
        CHECK_THROWS_AS(
            diffusion::multivariate_ruin_diffusion(
                big, testsupport::all_query(std::vector<double>(m, 5.0),
                                            10.0, 0)),
            std::invalid_argument);
    }
    SECTION("independence baseline multiplies the marginals") {
        const auto q = testsupport::all_query({10.0, 10.0}, 50.0, 1);
        const double indep = diffusion::independence_ruin(base, q);
        const double psi =
            diffusion::univariate_bm_ruin(10.0, 0.1, 2.07, 50.0);
        CHECK_THAT(indep, WithinRel(psi * psi, 1e-12));
        const auto joint = diffusion::multivariate_ruin_diffusion(base, q);
        CHECK(joint.value > indep);
    }
}
