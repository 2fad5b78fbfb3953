#include "ruinlab/diffusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "ruinlab/markov.hpp"
#include "ruinlab/numerics.hpp"

namespace ruinlab::diffusion {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kEigenvalueFloor = -1e-10;
constexpr double kCorrelationMargin = 1e-9;
constexpr double kSeriesTol = 1e-14;
constexpr int kSeriesMaxTerms = 500;
constexpr int kJointComponentCap = 12;

// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi sweeps. The
// matrices here are tiny (at most 12 x 12), so the quadratic sweep cost is
// irrelevant next to its unconditional stability.
double min_eigenvalue(std::vector<double> a, int n) {
    if (n == 1) {
        return a[0];
    }
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        double diag = 0.0;
        for (int p = 0; p < n; ++p) {
            diag += a[p * n + p] * a[p * n + p];
            for (int q = p + 1; q < n; ++q) {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if (off <= 1e-30 * (diag + 1.0)) {
            break;
        }
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e154) {
                    t = 1.0 / (2.0 * theta);
                } else {
                    const double mag = std::abs(theta) + std::hypot(theta, 1.0);
                    t = (theta >= 0.0 ? 1.0 : -1.0) / mag;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) {
                        continue;
                    }
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = a[p * n + k] = c * akp - s * akq;
                    a[k * n + q] = a[q * n + k] = s * akp + c * akq;
                }
                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = a[q * n + p] = 0.0;
            }
        }
    }
    double smallest = a[0];
    for (int p = 1; p < n; ++p) {
        smallest = std::min(smallest, a[p * n + p]);
    }
    return smallest;
}

// log of the standard normal distribution function, finite far into the
// left tail where normal_cdf itself underflows.
double log_normal_cdf(double z) {
    if (z > -37.0) {
        return std::log(numerics::normal_cdf(z));
    }
    const double z2 = z * z;
    return -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) +
           std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
}

void require_valid(const model::RiskModel& model, const model::RuinQuery& query,
                   const char* where) {
    const std::vector<model::Violation> violations = model::validate(model, query);
    if (!violations.empty()) {
        throw std::invalid_argument(std::string(where) + ": " +
                                    violations.front().message);
    }
}

// The component set a query's joint probability ranges over.
std::vector<int> query_components(const model::RiskModel& model,
                                  const model::RuinQuery& query) {
    switch (query.mode) {
        case model::RuinQuery::Mode::Marginal:
            return {query.marginal};
        case model::RuinQuery::Mode::Subset:
            return query.subset;
        case model::RuinQuery::Mode::AllComponents:
        case model::RuinQuery::Mode::AnyComponent:
            break;
    }
    std::vector<int> all(static_cast<std::size_t>(model.components));
    for (int i = 0; i < model.components; ++i) {
        all[static_cast<std::size_t>(i)] = i;
    }
    return all;
}

// Survival probabilities of the members of one query over the horizon,
// marginally and pairwise, under the Brownian approximation.
struct SurvivalTable {
    std::vector<double> single;           // per member
    std::vector<double> pair;             // member x member, row-major
    double pair_at(std::size_t a, std::size_t b) const {
        return pair[a * single.size() + b];
    }
};

SurvivalTable survival_table(const DiffusionSpec& spec,
                             const model::RuinQuery& query,
                             const std::vector<int>& members, bool pairs) {
    const int m = spec.components;
    SurvivalTable table;
    table.single.resize(members.size());
    for (std::size_t a = 0; a < members.size(); ++a) {
        const int i = members[a];
        table.single[a] =
            1.0 - univariate_bm_ruin(query.initial_capital[i], spec.drift[i],
                                     spec.covariance[i * m + i], query.horizon);
    }
    if (!pairs) {
        return table;
    }
    table.pair.assign(members.size() * members.size(), 0.0);
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            const int i = members[a];
            const int k = members[b];
            const double joint = bivariate_bm_joint_survival(
                query.initial_capital[i], query.initial_capital[k],
                spec.drift[i], spec.drift[k], spec.covariance[i * m + i],
                spec.covariance[k * m + k], spec.covariance[i * m + k],
                query.horizon);
            table.pair[a * members.size() + b] = joint;
            table.pair[b * members.size() + a] = joint;
        }
    }
    return table;
}

// Joint survival of the members selected by `mask`, exact for up to two
// members and pairwise-corrected beyond:
//   S_A ~ prod_k S_k * (1 + sum_{pairs} (S_ij / (S_i S_j) - 1)).
double masked_survival(const SurvivalTable& table, unsigned mask,
                       bool& used_correction) {
    std::vector<std::size_t> picked;
    for (std::size_t a = 0; a < table.single.size(); ++a) {
        if (mask & (1u << a)) {
            picked.push_back(a);
        }
    }
    if (picked.empty()) {
        return 1.0;
    }
    if (picked.size() == 1) {
        return table.single[picked[0]];
    }
    if (picked.size() == 2) {
        return table.pair_at(picked[0], picked[1]);
    }
    used_correction = true;
    double prod = 1.0;
    for (std::size_t a : picked) {
        prod *= table.single[a];
    }
    if (prod == 0.0) {
        return 0.0;
    }
    double correction = 0.0;
    for (std::size_t x = 0; x < picked.size(); ++x) {
        for (std::size_t y = x + 1; y < picked.size(); ++y) {
            const std::size_t a = picked[x];
            const std::size_t b = picked[y];
            correction +=
                table.pair_at(a, b) / (table.single[a] * table.single[b]) - 1.0;
        }
    }
    return prod * (1.0 + correction);
}

}  // namespace

AsymptoticMoments asymptotic_moments(const model::RiskModel& model) {
    const std::vector<model::Violation> violations = model::validate(model);
    if (!violations.empty()) {
        throw std::invalid_argument("asymptotic_moments: " +
                                    violations.front().message);
    }
    const int m = model.components;
    const int n = model.environment.states;
    const std::vector<double> pi =
        markov::stationary_distribution(model.environment).pi;
    const markov::FundamentalMatrix U =
        markov::fundamental_matrix(model.environment);

    AsymptoticMoments out;
    out.components = m;
    out.mean_claim_rate.assign(static_cast<std::size_t>(m), 0.0);
    out.second_moment_rate.assign(static_cast<std::size_t>(m), 0.0);
    out.variance_rate.assign(static_cast<std::size_t>(m), 0.0);
    out.cross.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m),
                     0.0);

    // weighted[i*n + j] = lambda(i,j) * mean(i,j): the claim flow intensity
    // of component i in state j, the quantity the cross terms couple.
    std::vector<double> weighted(static_cast<std::size_t>(m) *
                                 static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            const double lambda = model.arrival_rate(i, j);
            const model::ClaimMoments mom = model::claim_moments(model.claim(i, j));
            weighted[i * n + j] = lambda * mom.mean;
            out.mean_claim_rate[i] += lambda * mom.mean * pi[j];
            out.second_moment_rate[i] += lambda * mom.second_moment * pi[j];
            out.variance_rate[i] += lambda * mom.variance * pi[j];
        }
    }
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) {
            double sum = 0.0;
            for (int j = 0; j < n; ++j) {
                double inner = 0.0;
                for (int l = 0; l < n; ++l) {
                    inner += weighted[k * n + l] * U.at(j, l);
                }
                sum += weighted[i * n + j] * pi[j] * inner;
            }
            out.cross[i * m + k] = 2.0 * sum;
        }
    }
    return out;
}

DiffusionSpec covariance(const AsymptoticMoments& moments,
                         const model::RiskModel& model,
                         CovarianceRegime regime) {
    const int m = moments.components;
    if (m != model.components) {
        throw std::invalid_argument(
            "covariance: moments and model disagree on the component count");
    }
    DiffusionSpec spec;
    spec.components = m;
    spec.drift.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        spec.drift[i] = model.premiums[i] - moments.mean_claim_rate[i];
    }
    spec.covariance.assign(
        static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
    const bool claim_part = regime != CovarianceRegime::ModulationNoise;
    const bool modulation_part = regime != CovarianceRegime::ClaimNoise;
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) {
            double value = modulation_part ? moments.cross[i * m + k] : 0.0;
            if (claim_part && i == k) {
                value += moments.second_moment_rate[i];
            }
            spec.covariance[i * m + k] = value;
        }
    }

    double asymmetry = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int k = i + 1; k < m; ++k) {
            asymmetry = std::max(std::abs(spec.covariance[i * m + k] -
                                          spec.covariance[k * m + i]),
                                 asymmetry);
        }
    }
    if (asymmetry > kSymmetryTol) {
        spec.symmetrized = true;
        for (int i = 0; i < m; ++i) {
            for (int k = i + 1; k < m; ++k) {
                const double mean =
                    0.5 * (spec.covariance[i * m + k] + spec.covariance[k * m + i]);
                spec.covariance[i * m + k] = mean;
                spec.covariance[k * m + i] = mean;
            }
        }
    } else if (asymmetry > 0.0) {
        // Below the reporting threshold; still make it exactly symmetric so
        // downstream consumers need no per-entry care.
        for (int i = 0; i < m; ++i) {
            for (int k = i + 1; k < m; ++k) {
                spec.covariance[k * m + i] = spec.covariance[i * m + k];
            }
        }
    }

    if (min_eigenvalue(spec.covariance, m) < kEigenvalueFloor) {
        throw std::domain_error(
            "covariance: assembled matrix is indefinite beyond the tolerance");
    }
    return spec;
}

double univariate_bm_ruin(double u, double drift, double variance,
                          double horizon) {
    if (!(variance >= 0.0) || !(horizon > 0.0)) {
        throw std::domain_error(
            "univariate_bm_ruin: needs variance >= 0 and horizon > 0");
    }
    if (u <= 0.0) {
        return 1.0;
    }
    if (variance == 0.0) {
        // Deterministic path u + drift t; the strict minimum over (0, T] is
        // at the horizon when the drift points down.
        return u + drift * horizon < 0.0 ? 1.0 : 0.0;
    }
    const double spread = std::sqrt(variance * horizon);
    const double direct = numerics::normal_cdf((-u - drift * horizon) / spread);
    const double z = (-u + drift * horizon) / spread;
    const double exponent = -2.0 * drift * u / variance;
    double reflected;
    if (exponent > 700.0) {
        // exp() alone would overflow; the paired cdf factor is tiny, so fold
        // them in log space.
        reflected = std::exp(exponent + log_normal_cdf(z));
    } else {
        reflected = std::exp(exponent) * numerics::normal_cdf(z);
    }
    return std::min(1.0, direct + reflected);
}

double bivariate_bm_joint_survival(double u1, double u2, double drift1,
                                   double drift2, double var1, double var2,
                                   double cov12, double horizon,
                                   double rel_tol, double abs_tol,
                                   int max_subdivisions) {
    if (!(var1 > 0.0) || !(var2 > 0.0) || !(horizon > 0.0)) {
        throw std::domain_error(
            "bivariate_bm_joint_survival: needs positive variances and horizon");
    }
    if (u1 <= 0.0 || u2 <= 0.0) {
        // A Brownian surplus starting at or below the boundary fails to stay
        // positive with probability one.
        return 0.0;
    }
    const double sd1 = std::sqrt(var1);
    const double sd2 = std::sqrt(var2);
    const double rho = cov12 / (sd1 * sd2);
    if (std::abs(rho) >= 1.0 - kCorrelationMargin) {
        throw std::domain_error(
            "bivariate_bm_joint_survival: correlation too close to +-1, the "
            "wedge expansion degenerates");
    }
    const double rho_comp = 1.0 - rho * rho;
    const double root_comp = std::sqrt(rho_comp);

    // A barrier that is effectively unreachable makes the wedge expansion
    // hopeless (the Bessel orders needed grow like r0^2/T) but also
    // unnecessary: |S12 - S_other| <= ruin probability of the far
    // component, so once that probability is below 1e-12 the joint
    // survival IS the other component's survival at working precision.
    constexpr double kUnreachable = 1e-12;
    const double ruin1 = univariate_bm_ruin(u1, drift1, var1, horizon);
    const double ruin2 = univariate_bm_ruin(u2, drift2, var2, horizon);
    if (ruin1 <= kUnreachable && ruin2 <= kUnreachable) {
        return (1.0 - ruin1) * (1.0 - ruin2);
    }
    if (ruin1 <= kUnreachable) {
        return 1.0 - ruin2;
    }
    if (ruin2 <= kUnreachable) {
        return 1.0 - ruin1;
    }

    // Standardize to unit variances: z = u / sd starting points, c = drift / sd
    // drift rates, correlated standard Brownian noise with correlation rho.
    const double z1 = u1 / sd1;
    const double z2 = u2 / sd2;
    const double c1 = drift1 / sd1;
    const double c2 = drift2 / sd2;

    // Whiten into a wedge of angle alpha = arccos(-rho); the survival region
    // maps to polar angle in (0, alpha).
    const double alpha = std::acos(-rho);
    const double r0 =
        std::sqrt((z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2) / rho_comp);
    const double theta0 = std::atan2(z2, (z1 - rho * z2) / root_comp);
    const double a1 = (c1 - rho * c2) / rho_comp;
    const double a2 = (c2 - rho * c1) / rho_comp;

    const double T = horizon;
    const double freq = std::numbers::pi / alpha;
    const double r_max =
        r0 + (std::abs(a1) + std::abs(a2)) * T + 14.0 * std::sqrt(T);

    // Eigenfunction series over the wedge at polar point (r, theta). The
    // Gaussian kernel factor exp(-(r - r0)^2 / (2T)) stays with the caller;
    // the Bessel factor is the scaled form so that split is exact.
    auto series_sum = [&](double r, double theta) {
        const double arg = r * r0 / T;
        double total = 0.0;
        int small_in_a_row = 0;
        for (int n = 1; n <= kSeriesMaxTerms; ++n) {
            const double term = std::sin(n * freq * theta0) *
                                std::sin(n * freq * theta) *
                                numerics::bessel_i_scaled(n * freq, arg);
            total += term;
            if (n >= 4) {
                small_in_a_row =
                    std::abs(term) <= kSeriesTol * std::abs(total)
                        ? small_in_a_row + 1
                        : 0;
                if (small_in_a_row >= 2) {
                    return total;
                }
            }
        }
        throw std::runtime_error(
            "bivariate_bm_joint_survival: eigenfunction series did not "
            "converge within 500 terms");
    };

    auto radial_integrand = [&](double theta) {
        const double tilt1 = a1 * std::sin(alpha - theta);
        const double tilt2 = a2 * std::sin(theta);
        auto f = [&](double r) {
            const double dev = r - r0;
            const double envelope =
                std::exp((tilt1 + tilt2) * r - dev * dev / (2.0 * T));
            if (envelope == 0.0) {
                return 0.0;
            }
            return r * envelope * series_sum(r, theta);
        };
        const numerics::QuadratureResult inner = numerics::adaptive_quadrature(
            f, 0.0, r_max, rel_tol, abs_tol, max_subdivisions);
        if (!inner.converged) {
            throw std::runtime_error(
                "bivariate_bm_joint_survival: radial quadrature did not "
                "converge");
        }
        return inner.value;
    };

    const numerics::QuadratureResult outer = numerics::adaptive_quadrature(
        radial_integrand, 0.0, alpha, rel_tol, abs_tol, max_subdivisions);
    if (!outer.converged) {
        throw std::runtime_error(
            "bivariate_bm_joint_survival: angular quadrature did not converge");
    }

    const double prefactor =
        std::exp(-a1 * z1 - a2 * z2 - 0.5 * (c1 * a1 + c2 * a2) * T) * 2.0 /
        (alpha * T);
    return std::clamp(prefactor * outer.value, 0.0, 1.0);
}

DiffusionEstimate multivariate_ruin_diffusion(const model::RiskModel& model,
                                              const model::RuinQuery& query,
                                              CovarianceRegime regime) {
    require_valid(model, query, "multivariate_ruin_diffusion");
    const DiffusionSpec spec = covariance(asymptotic_moments(model), model, regime);

    DiffusionEstimate out;
    if (query.mode == model::RuinQuery::Mode::Marginal) {
        const int i = query.marginal;
        out.value = univariate_bm_ruin(query.initial_capital[i], spec.drift[i],
                                       spec.covariance[i * spec.components + i],
                                       query.horizon);
        return out;
    }

    const std::vector<int> members = query_components(model, query);
    if (members.size() > static_cast<std::size_t>(kJointComponentCap)) {
        throw std::invalid_argument(
            "multivariate_ruin_diffusion: joint queries support at most 12 "
            "components");
    }
    const SurvivalTable table =
        survival_table(spec, query, members, members.size() >= 2);

    bool used_correction = false;
    const unsigned full = (1u << members.size()) - 1u;
    double value;
    if (query.mode == model::RuinQuery::Mode::AnyComponent) {
        value = 1.0 - masked_survival(table, full, used_correction);
    } else {
        // P(all members ruined) by inclusion-exclusion over joint survivals.
        value = 0.0;
        for (unsigned mask = 0; mask <= full; ++mask) {
            const int bits = std::popcount(mask);
            const double sign = bits % 2 == 0 ? 1.0 : -1.0;
            value += sign * masked_survival(table, mask, used_correction);
        }
    }
    out.value = std::clamp(value, 0.0, 1.0);
    out.approximate = used_correction;
    return out;
}

double independence_ruin(const model::RiskModel& model,
                         const model::RuinQuery& query,
                         CovarianceRegime regime) {
    require_valid(model, query, "independence_ruin");
    const DiffusionSpec spec = covariance(asymptotic_moments(model), model, regime);
    const int m = spec.components;
    auto marginal_ruin = [&](int i) {
        return univariate_bm_ruin(query.initial_capital[i], spec.drift[i],
                                  spec.covariance[i * m + i], query.horizon);
    };
    switch (query.mode) {
        case model::RuinQuery::Mode::Marginal:
            return marginal_ruin(query.marginal);
        case model::RuinQuery::Mode::AnyComponent: {
            double survive_all = 1.0;
            for (int i = 0; i < m; ++i) {
                survive_all *= 1.0 - marginal_ruin(i);
            }
            return 1.0 - survive_all;
        }
        case model::RuinQuery::Mode::AllComponents: {
            double product = 1.0;
            for (int i = 0; i < m; ++i) {
                product *= marginal_ruin(i);
            }
            return product;
        }
        case model::RuinQuery::Mode::Subset:
            break;
    }
    double product = 1.0;
    for (int i : query.subset) {
        product *= marginal_ruin(i);
    }
    return product;
}

}  // namespace ruinlab::diffusion
