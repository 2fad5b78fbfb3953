// Diffusion approximation of the modulated model: replace each surplus by a
// Brownian motion matching the long-run drift and the covariance structure
// of the scaled claim flow, then evaluate ruin probabilities of the limit
// in closed or quadrature form.
#pragma once

#include <vector>

#include "ruinlab/model.hpp"

namespace ruinlab::diffusion {

// Stationary-averaged rates of the claim flow. For component i these are
// averages over the stationary environment law:
//   mean_claim_rate[i]     sum_j lambda(i,j) * mean(i,j)        * pi_j
//   second_moment_rate[i]  sum_j lambda(i,j) * second_moment(i,j)* pi_j
//   variance_rate[i]       sum_j lambda(i,j) * variance(i,j)    * pi_j
// cross[i*m + k] couples components through environment modulation:
//   2 * sum_{j,l} lambda(i,j) mean(i,j) lambda(k,l) mean(k,l) pi_j U(j,l)
// with U the fundamental matrix. The diagonal of `cross` is genuinely
// nonzero: a component co-varies with itself through the environment.
struct AsymptoticMoments {
    int components = 0;
    std::vector<double> mean_claim_rate;
    std::vector<double> second_moment_rate;
    std::vector<double> variance_rate;
    std::vector<double> cross;  // components x components, row-major
};

// Which noise sources enter the limit covariance. The right choice depends
// on how fast the environment mixes relative to the claim arrivals:
//   ClaimNoise:      claim-level variability only (fast environment).
//   Combined:        claim-level plus modulation terms (comparable scales;
//                    the default, and the one the numerical study uses).
//   ModulationNoise: modulation term only (slowly mixing environment).
enum class CovarianceRegime {
    ClaimNoise,
    Combined,
    ModulationNoise,
};

// Drift and covariance of the approximating Brownian surplus: component i
// behaves as u_i + drift[i] t + correlated BM with the given covariance
// per unit time. `symmetrized` reports that the cross matrix had an
// asymmetry above 1e-10 and was replaced by its symmetric part.
struct DiffusionSpec {
    int components = 0;
    std::vector<double> drift;       // premiums minus mean claim rates
    std::vector<double> covariance;  // components x components, row-major
    bool symmetrized = false;
};

// A diffusion-based probability. `approximate` marks values that went
// through the pairwise-correction combiner for three or more components
// (two or fewer are exact given the quadrature tolerance).
struct DiffusionEstimate {
    double value = 0.0;
    bool approximate = false;
};

// Computes the stationary-averaged moment rates of a model.
AsymptoticMoments asymptotic_moments(const model::RiskModel& model);

// Assembles the limit covariance matrix for a regime. Verifies symmetry
// (symmetrizing with a report when violated beyond 1e-10) and positive
// semidefiniteness up to an eigenvalue floor of -1e-10; throws
// std::domain_error when the matrix is indefinite beyond that floor.
DiffusionSpec covariance(const AsymptoticMoments& moments,
                         const model::RiskModel& model,
                         CovarianceRegime regime = CovarianceRegime::Combined);

// Finite-horizon ruin probability of one Brownian surplus with the given
// drift and variance per unit time, started at u:
//   N((-u - drift T)/sqrt(var T)) + exp(-2 drift u / var) N((-u + drift T)/sqrt(var T)).
// u <= 0 returns 1 (the boundary is already crossed or touched from below
// at once); zero variance degenerates to the deterministic path.
double univariate_bm_ruin(double u, double drift, double variance,
                          double horizon);

// Probability that BOTH components of a correlated Brownian surplus stay
// positive on [0, horizon]. Evaluated by a wedge eigenfunction expansion
// (angle arccos(-correlation)) integrated with the adaptive quadrature.
// Throws std::domain_error when |correlation| >= 1 - 1e-9 (the wedge
// degenerates) and std::runtime_error if the eigenfunction series fails to
// converge within 500 terms or the quadrature does not converge.
double bivariate_bm_joint_survival(double u1, double u2, double drift1,
                                   double drift2, double var1, double var2,
                                   double cov12, double horizon,
                                   double rel_tol = 1e-6,
                                   double abs_tol = 1e-10,
                                   int max_subdivisions = 200);

// Ruin probability of the query under the diffusion approximation.
// Marginal queries use the univariate formula; two-component joint queries
// combine univariate and bivariate survivals by inclusion-exclusion; three
// to twelve components use pairwise-corrected subset survivals inside the
// inclusion-exclusion sum and set `approximate`. More than twelve
// components is refused (std::invalid_argument): 2^m subset terms with
// pairwise corrections stop being meaningful long before they stop being
// computable.
DiffusionEstimate multivariate_ruin_diffusion(
    const model::RiskModel& model, const model::RuinQuery& query,
    CovarianceRegime regime = CovarianceRegime::Combined);

// Same query semantics with all cross-component dependence dropped: the
// product of marginal diffusion ruin/survival probabilities. The cheap
// baseline the dependence-aware numbers are judged against.
double independence_ruin(const model::RiskModel& model,
                         const model::RuinQuery& query,
                         CovarianceRegime regime = CovarianceRegime::Combined);

}  // namespace ruinlab::diffusion
