// Constants and declarations shared by the scalar and AVX2 kernel
// translation units. Everything here is part of the bitwise-equality
// contract: both variants read the same tables and combine them with the
// same operation trees.
#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace ruinlab::kernels::detail {

// philox4x64-10 multipliers and key schedule increments.
inline constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ull;
inline constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ull;
inline constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73Bull;

// Split ln 2 plus friends. The high part keeps 25 mantissa bits, so
// n * ln2_hi is exact for the integer exponents n that the log/exp
// reductions produce (|n| <= 1074 < 2^11). The low part carries the next
// 53 bits of the true ln 2, not merely the remainder of its double
// rounding; the pair represents ln 2 to ~107 bits, which keeps the exp
// reduction error below an ulp even at |n| ~ 1000.
struct LogConstants {
    double ln2_hi;
    double ln2_lo;
    double inv_ln2;
    double sqrt_half;
    double sqrt_two;
};

inline const LogConstants& log_constants() {
    static const LogConstants c = [] {
        LogConstants k{};
        k.ln2_hi = 0x1.62e42f8p-1;
        k.ln2_lo = 0x1.be8e7bcd5e4f2p-27;
        k.inv_ln2 = 0x1.71547652b82fep+0;
        k.sqrt_half = std::sqrt(0.5);
        k.sqrt_two = std::sqrt(2.0);
        return k;
    }();
    return c;
}

// atanh series for the log core: log m = 2 s P(s^2), s = (m-1)/(m+1) with
// m reduced to [sqrt(1/2), sqrt(2)), so s^2 <= 0.0295 and the tail beyond
// the last kept term is below one ulp.
inline constexpr double kLogCoef[] = {
    1.0,        1.0 / 3.0,  1.0 / 5.0,  1.0 / 7.0,  1.0 / 9.0,  1.0 / 11.0,
    1.0 / 13.0, 1.0 / 15.0, 1.0 / 17.0, 1.0 / 19.0, 1.0 / 21.0,
};

// Taylor coefficients 1/k! for the exp core on |r| <= (ln 2)/2.
inline constexpr double kExpCoef[] = {
    1.0,
    1.0,
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
    1.0 / 362880.0,
    1.0 / 3628800.0,
    1.0 / 39916800.0,
    1.0 / 479001600.0,
    1.0 / 6227020800.0,
};

// Rational minimax coefficients for the normal quantile, from the Boost.Math
// inverse error function (Boost Software License 1.0). The quantile is
// computed as +-sqrt(2) * erfc_inv(z) with z = 2 min(u, 1-u); branch layout
// follows the source: central for z >= 0.5 (argument 1-z), a mid branch on
// 0.25 <= z < 0.5, and tail branches in x = sqrt(-log z).
inline constexpr double kQuantCentralY = 0.0891314744949340820313f;
inline constexpr double kQuantCentralP[] = {
    -0.000508781949658280665617,
    -0.00836874819741736770379,
    0.0334806625409744615033,
    -0.0126926147662974029034,
    -0.0365637971411762664006,
    0.0219878681111168899165,
    0.00822687874676915743155,
    -0.00538772965071242932965,
};
inline constexpr double kQuantCentralQ[] = {
    1.0,
    -0.970005043303290640362,
    -1.56574558234175846809,
    1.56221558398423026363,
    0.662328840472002992063,
    -0.71228902341542847553,
    -0.0527396382340099713954,
    0.0795283687341571680018,
    -0.00233393759374190016776,
    0.000886216390456424707504,
};

inline constexpr double kQuantMidY = 2.249481201171875f;
inline constexpr double kQuantMidP[] = {
    -0.202433508355938759655,
    0.105264680699391713268,
    8.37050328343119927838,
    17.6447298408374015486,
    -18.8510648058714251895,
    -44.6382324441786960818,
    17.445385985570866523,
    21.1294655448340526258,
    -3.67192254707729348546,
};
inline constexpr double kQuantMidQ[] = {
    1.0,
    6.24264124854247537712,
    3.9713437953343869095,
    -28.6608180499800029974,
    -20.1432634680485188801,
    48.5609213108739935468,
    10.8268667355460159008,
    -22.6436933413139721736,
    1.72114765761200282724,
};

// Tail branch for x = sqrt(-log z) in [1.1, 3); expansion point 1.125.
inline constexpr double kQuantTail3Y = 0.807220458984375f;
inline constexpr double kQuantTail3P[] = {
    -0.131102781679951906451,
    -0.163794047193317060787,
    0.117030156341995252019,
    0.387079738972604337464,
    0.337785538912035898924,
    0.142869534408157156766,
    0.0290157910005329060432,
    0.00214558995388805277169,
    -0.679465575181126350155e-6,
    0.285225331782217055858e-7,
    -0.681149956853776992068e-9,
};
inline constexpr double kQuantTail3Q[] = {
    1.0,
    3.46625407242567245975,
    5.38168345707006855425,
    4.77846592945843778382,
    2.59301921623620271374,
    0.848854343457902036425,
    0.152264338295331783612,
    0.01105924229346489121,
};

// Tail branch for x in [3, 6); expansion point 3.
inline constexpr double kQuantTail6Y = 0.93995571136474609375f;
inline constexpr double kQuantTail6P[] = {
    -0.0350353787183177984712,
    -0.00222426529213447927281,
    0.0185573306514231072324,
    0.00950804701325919603619,
    0.00187123492819559223345,
    0.000157544617424960554631,
    0.460469890584317994083e-5,
    -0.230404776911882601748e-9,
    0.266339227425782031962e-11,
};
inline constexpr double kQuantTail6Q[] = {
    1.0,
    1.3653349817554063097,
    0.762059164553623404043,
    0.220091105764131249824,
    0.0341589143670947727934,
    0.00263861676657015992959,
    0.764675292302794483503e-4,
};

// Tail branch for x in [6, 18); expansion point 6.
inline constexpr double kQuantTail18Y = 0.98362827301025390625f;
inline constexpr double kQuantTail18P[] = {
    -0.0167431005076633737133,
    -0.00112951438745580278863,
    0.00105628862152492910091,
    0.000209386317487588078668,
    0.149624783758342370182e-4,
    0.449696789927706453732e-6,
    0.462596163522878599135e-8,
    -0.281128735628831791805e-13,
    0.99055709973310326855e-16,
};
inline constexpr double kQuantTail18Q[] = {
    1.0,
    0.591429344886417493481,
    0.138151865749083321638,
    0.0160746087093676504695,
    0.000964011807005165528527,
    0.275335474764726041141e-4,
    0.282243172016108031869e-6,
};

// Tail branch for x in [18, 44); expansion point 18. The smallest positive
// double has sqrt(-log z) < 28, so this branch covers everything beyond 18.
inline constexpr double kQuantTail44Y = 0.99714565277099609375f;
inline constexpr double kQuantTail44P[] = {
    -0.0024978212791898131227,
    -0.779190719229053954292e-5,
    0.254723037413027451751e-4,
    0.162397777342510920873e-5,
    0.396341011304801168516e-7,
    0.411632831190944208473e-9,
    0.145596286718675035587e-11,
    -0.116765012397184275695e-17,
};
inline constexpr double kQuantTail44Q[] = {
    1.0,
    0.207123112214422517181,
    0.0169410838120975906478,
    0.000690538265622684595676,
    0.145007359818232637924e-4,
    0.144437756628144157666e-6,
    0.509761276599778486139e-9,
};

// Horner evaluation, lowest coefficient first; matches the evaluation
// order the vector code uses lane-wise.
template <std::size_t N>
inline double horner(const double (&coef)[N], double x) {
    double acc = coef[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) {
        acc = acc * x + coef[i];
    }
    return acc;
}

// Scalar batch implementations (defined in scalar.cpp).
void scalar_batch_uniform(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t first, std::size_t n, double* out);
void scalar_batch_normal(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t first, std::size_t n, double* out);
void scalar_batch_exponential(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t first, std::size_t n, double mean,
                              double* out);
void scalar_batch_exp(const double* x, std::size_t n, double* out);

// AVX2 batch implementations (defined in avx2.cpp; call only when the CPU
// supports AVX2).
void avx2_batch_uniform(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t first, std::size_t n, double* out);
void avx2_batch_normal(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t first, std::size_t n, double* out);
void avx2_batch_exponential(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t first, std::size_t n, double mean,
                            double* out);
void avx2_batch_exp(const double* x, std::size_t n, double* out);

}  // namespace ruinlab::kernels::detail
