// Reference scalar kernels. Every arithmetic step here is mirrored by the
// AVX2 translation unit; changing an operation order in one place without
// the other breaks the bitwise-equivalence suite.
#include "ruinlab/kernels.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "internal.hpp"

namespace ruinlab::kernels {

namespace {

struct WideProduct {
    std::uint64_t hi;
    std::uint64_t lo;
};

inline WideProduct mulhilo(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
}

}  // namespace

void philox_block(std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t block, std::uint64_t out[4]) {
    std::uint64_t c0 = block;
    std::uint64_t c1 = 0;
    std::uint64_t c2 = 0;
    std::uint64_t c3 = 0;
    std::uint64_t k0 = seed;
    std::uint64_t k1 = stream;
    for (int round = 0;; ++round) {
        const WideProduct p0 = mulhilo(detail::kPhiloxM0, c0);
        const WideProduct p1 = mulhilo(detail::kPhiloxM1, c2);
        const std::uint64_t n0 = p1.hi ^ c1 ^ k0;
        const std::uint64_t n1 = p1.lo;
        const std::uint64_t n2 = p0.hi ^ c3 ^ k1;
        const std::uint64_t n3 = p0.lo;
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        if (round == 9) {
            break;
        }
        k0 += detail::kPhiloxW0;
        k1 += detail::kPhiloxW1;
    }
    out[0] = c0;
    out[1] = c1;
    out[2] = c2;
    out[3] = c3;
}

std::uint64_t philox_draw(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index) {
    std::uint64_t words[4];
    philox_block(seed, stream, index >> 2, words);
    return words[index & 3];
}

double u64_to_open_unit(std::uint64_t w) {
    // (w >> 12) fits in 52 bits, so the cast, the +0.5 and the power-of-two
    // scale are all exact; results lie strictly inside (0, 1).
    return (static_cast<double>(w >> 12) + 0.5) * 0x1p-52;
}

double log_core(double x) {
    const detail::LogConstants& lc = detail::log_constants();
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    double prescale = 0.0;
    if (bits < (std::uint64_t{1} << 52)) {
        // Subnormal input: renormalize so the exponent extraction below works.
        x *= 0x1p54;
        prescale = -54.0;
        bits = std::bit_cast<std::uint64_t>(x);
    }
    // x = m * 2^e with m in [0.5, 1), then double m once if needed so that
    // m lands in [sqrt(1/2), sqrt(2)) and the atanh series argument stays
    // small.
    int e = static_cast<int>((bits >> 52) & 0x7FF) - 1022;
    double m = std::bit_cast<double>((bits & ((std::uint64_t{1} << 52) - 1)) |
                                     (std::uint64_t{1022} << 52));
    if (m < lc.sqrt_half) {
        m = m * 2.0;
        e -= 1;
    }
    const double n = static_cast<double>(e) + prescale;
    const double s = (m - 1.0) / (m + 1.0);
    const double w = s * s;
    double p = detail::kLogCoef[10];
    for (int i = 9; i >= 0; --i) {
        p = p * w + detail::kLogCoef[i];
    }
    const double series = (2.0 * s) * p;
    return n * lc.ln2_hi + (series + n * lc.ln2_lo);
}

double exp_core(double x) {
    const detail::LogConstants& lc = detail::log_constants();
    if (std::isnan(x)) {
        return x;
    }
    if (x < -708.0) {
        return 0.0;
    }
    if (x > 708.0) {
        return std::numeric_limits<double>::infinity();
    }
    // x = n ln2 + r with |r| <= (ln 2)/2; the split ln2 keeps r accurate.
    const double n = std::nearbyint(x * lc.inv_ln2);
    const double r = (x - n * lc.ln2_hi) - n * lc.ln2_lo;
    double p = detail::kExpCoef[13];
    for (int i = 12; i >= 0; --i) {
        p = p * r + detail::kExpCoef[i];
    }
    // |x| <= 708 keeps n in [-1022, 1022], so 2^n is a normal double and
    // can be assembled directly in the exponent field.
    const std::int64_t ni = static_cast<std::int64_t>(n);
    const double scale =
        std::bit_cast<double>(static_cast<std::uint64_t>(ni + 1023) << 52);
    return p * scale;
}

double normal_quantile_core(double u) {
    const detail::LogConstants& lc = detail::log_constants();
    const double um = u < 0.5 ? u : 1.0 - u;
    const double z = 2.0 * um;
    double x;
    if (z >= 0.5) {
        const double p = 1.0 - z;
        const double g = p * (p + 10.0);
        const double r =
            detail::horner(detail::kQuantCentralP, p) / detail::horner(detail::kQuantCentralQ, p);
        x = g * detail::kQuantCentralY + g * r;
    } else {
        const double w = -log_core(z);
        if (z >= 0.25) {
            const double g = std::sqrt(2.0 * w);
            const double xs = z - 0.25;
            const double r =
                detail::horner(detail::kQuantMidP, xs) / detail::horner(detail::kQuantMidQ, xs);
            x = g / (detail::kQuantMidY + r);
        } else {
            const double t = std::sqrt(w);
            if (t < 3.0) {
                const double xs = t - 1.125;
                const double r =
                    detail::horner(detail::kQuantTail3P, xs) / detail::horner(detail::kQuantTail3Q, xs);
                x = detail::kQuantTail3Y * t + r * t;
            } else if (t < 6.0) {
                const double xs = t - 3.0;
                const double r =
                    detail::horner(detail::kQuantTail6P, xs) / detail::horner(detail::kQuantTail6Q, xs);
                x = detail::kQuantTail6Y * t + r * t;
            } else if (t < 18.0) {
                const double xs = t - 6.0;
                const double r =
                    detail::horner(detail::kQuantTail18P, xs) / detail::horner(detail::kQuantTail18Q, xs);
                x = detail::kQuantTail18Y * t + r * t;
            } else {
                const double xs = t - 18.0;
                const double r =
                    detail::horner(detail::kQuantTail44P, xs) / detail::horner(detail::kQuantTail44Q, xs);
                x = detail::kQuantTail44Y * t + r * t;
            }
        }
    }
    const double q = lc.sqrt_two * x;
    return u < 0.5 ? -q : q;
}

namespace detail {

namespace {

// Shared driver: walks draw indices, fetching philox blocks as needed and
// applying `transform` to each raw word.
template <typename Transform>
void scalar_batch(std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first, std::size_t n, double* out,
                  Transform transform) {
    std::uint64_t words[4];
    std::uint64_t cached_block = 0;
    bool have_block = false;
    std::uint64_t index = first;
    for (std::size_t k = 0; k < n; ++k, ++index) {
        const std::uint64_t block = index >> 2;
        if (!have_block || block != cached_block) {
            philox_block(seed, stream, block, words);
            cached_block = block;
            have_block = true;
        }
        out[k] = transform(words[index & 3]);
    }
}

}  // namespace

void scalar_batch_uniform(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t first, std::size_t n, double* out) {
    scalar_batch(seed, stream, first, n, out,
                 [](std::uint64_t w) { return u64_to_open_unit(w); });
}

void scalar_batch_normal(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t first, std::size_t n, double* out) {
    scalar_batch(seed, stream, first, n, out, [](std::uint64_t w) {
        return normal_quantile_core(u64_to_open_unit(w));
    });
}

void scalar_batch_exponential(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t first, std::size_t n, double mean,
                              double* out) {
    scalar_batch(seed, stream, first, n, out, [mean](std::uint64_t w) {
        return (-mean) * log_core(u64_to_open_unit(w));
    });
}

void scalar_batch_exp(const double* x, std::size_t n, double* out) {
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = exp_core(x[k]);
    }
}

}  // namespace detail

}  // namespace ruinlab::kernels
