#include "ruinlab/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ruinlab::numerics {

namespace {

#include "olver_table.inc"

// Branch layout. Below the boundary the ascending series has all-positive
// terms (no cancellation) and converges fast; above it the uniform
// asymptotic expansion takes over, with a stable downward recurrence to
// reach orders too small for the expansion itself.
constexpr double kSeriesMaxX = 30.0;
constexpr double kDirectOlverMinOrder = 26.0;
constexpr int kRecurrenceExtra = 28;

// exp(-x) I_nu(x) by ascending series; for x <= kSeriesMaxX.
double series_scaled(double nu, double x) {
    if (x == 0.0) {
        return nu == 0.0 ? 1.0 : 0.0;
    }
    // Leading term (x/2)^nu / Gamma(nu+1) in log space; below exp underflow
    // the entire sum is indistinguishable from zero at this x.
    const double lt0 = nu * std::log(0.5 * x) - std::lgamma(nu + 1.0);
    if (lt0 < -745.0) {
        return 0.0;
    }
    const double t0 = std::exp(lt0);
    const double q = 0.25 * x * x;
    double term = t0;
    double total = t0;
    for (int k = 1; k <= 400; ++k) {
        term *= q / (k * (k + nu));
        total += term;
        if (term < total * 1e-17) {
            break;
        }
    }
    return total * std::exp(-x);
}

// u_k(t) / t^k as a polynomial in t^2, Horner from the highest power.
double scaled_uk(int k, double t2) {
    const int lo = kOlverOffset[k];
    const int hi = kOlverOffset[k + 1];
    double acc = kOlverCoef[hi - 1];
    for (int j = hi - 2; j >= lo; --j) {
        acc = acc * t2 + kOlverCoef[j];
    }
    return acc;
}

// exp(-x) I_nu(x) via the uniform asymptotic expansion in the order;
// accurate once nu >= kDirectOlverMinOrder (given x > kSeriesMaxX).
double olver_scaled(double nu, double x) {
    const double z = x / nu;
    const double r = std::hypot(1.0, z);  // sqrt(1 + z^2)
    const double t = 1.0 / r;
    // eta - z = sqrt(1+z^2) - z + log(z / (1 + sqrt(1+z^2))); the first
    // difference is rewritten as 1/(r+z) to avoid cancellation for large z.
    const double eta_minus_z = 1.0 / (r + z) + std::log(z / (1.0 + r));
    const double t2 = t * t;
    double sum = 0.0;
    double weight = 1.0;  // (t / nu)^k
    for (int k = 0; k < kOlverTerms; ++k) {
        sum += scaled_uk(k, t2) * weight;
        weight *= t / nu;
    }
    return std::exp(nu * eta_minus_z) * sum / std::sqrt(2.0 * std::numbers::pi * nu * r);
}

double scaled_impl(double nu, double x) {
    if (x <= kSeriesMaxX) {
        return series_scaled(nu, x);
    }
    if (nu >= kDirectOlverMinOrder) {
        return olver_scaled(nu, x);
    }
    // Orders below the expansion's reach: seed two high orders and walk
    // down with I_{mu-1} = I_{mu+1} + (2 mu / x) I_mu, which is stable in
    // this direction and preserves the exp(-x) scaling.
    double above = olver_scaled(nu + kRecurrenceExtra + 1, x);
    double at = olver_scaled(nu + kRecurrenceExtra, x);
    for (int j = kRecurrenceExtra; j > 0; --j) {
        const double below = above + (2.0 * (nu + j) / x) * at;
        above = at;
        at = below;
    }
    return at;
}

void check_domain(double nu, double x) {
    // The negated comparisons also reject NaN.
    if (!(nu >= 0.0) || !(x >= 0.0)) {
        throw std::domain_error("bessel_i: requires nu >= 0 and x >= 0");
    }
}

}  // namespace

double bessel_i_scaled(double nu, double x) {
    check_domain(nu, x);
    return scaled_impl(nu, x);
}

double bessel_i(double nu, double x) {
    check_domain(nu, x);
    const double scaled = scaled_impl(nu, x);
    // exp(-x) I_nu(x) <= 1 for all supported arguments, so below the exp
    // overflow threshold the product cannot overflow.
    if (x <= 709.0) {
        return scaled * std::exp(x);
    }
    if (scaled == 0.0) {
        return 0.0;
    }
    const double log_value = std::log(scaled) + x;
    if (log_value >= 709.78) {
        throw std::overflow_error("bessel_i: value exceeds double range, use bessel_i_scaled");
    }
    return std::exp(log_value);
}

}  // namespace ruinlab::numerics
