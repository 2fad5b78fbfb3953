// AVX2 kernel variant. Mirrors the scalar reference arithmetic exactly:
// the same reductions, the same Horner orders, division and square root
// only (no FMA, no reciprocal approximations), so outputs are bitwise
// identical to scalar.cpp. Only compiled-in call sites guard on CPU
// support; this translation unit is the only one built with -mavx2.
#include <immintrin.h>

#include <bit>
#include <cstdint>
#include <limits>

#include "ruinlab/kernels.hpp"
#include "internal.hpp"

namespace ruinlab::kernels::detail {

namespace {

inline __m256i set1_u64(std::uint64_t v) {
    return _mm256_set1_epi64x(static_cast<long long>(v));
}

// Multiplier constant split into 32-bit halves, broadcast per lane.
struct MulConst {
    __m256i lo32;
    __m256i hi32;
};

inline MulConst broadcast_mul_const(std::uint64_t m) {
    return {set1_u64(m & 0xFFFFFFFFull), set1_u64(m >> 32)};
}

// 64x64 -> 128 bit multiply per lane via 32-bit limb products; exact.
inline void vmulhilo(const MulConst& a, __m256i b, __m256i* hi, __m256i* lo) {
    const __m256i mask = set1_u64(0xFFFFFFFFull);
    const __m256i bl = _mm256_and_si256(b, mask);
    const __m256i bh = _mm256_srli_epi64(b, 32);
    const __m256i ll = _mm256_mul_epu32(a.lo32, bl);
    const __m256i lh = _mm256_mul_epu32(a.lo32, bh);
    const __m256i hl = _mm256_mul_epu32(a.hi32, bl);
    const __m256i hh = _mm256_mul_epu32(a.hi32, bh);
    const __m256i mid = _mm256_add_epi64(
        _mm256_add_epi64(_mm256_srli_epi64(ll, 32), _mm256_and_si256(lh, mask)),
        _mm256_and_si256(hl, mask));
    *hi = _mm256_add_epi64(
        _mm256_add_epi64(hh, _mm256_srli_epi64(lh, 32)),
        _mm256_add_epi64(_mm256_srli_epi64(hl, 32), _mm256_srli_epi64(mid, 32)));
    *lo = _mm256_or_si256(_mm256_slli_epi64(mid, 32), _mm256_and_si256(ll, mask));
}

// Words of blocks base..base+3; rows[w] holds word w across the four blocks.
inline void philox4_blocks(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t base_block, __m256i rows[4]) {
    const MulConst m0 = broadcast_mul_const(kPhiloxM0);
    const MulConst m1 = broadcast_mul_const(kPhiloxM1);
    __m256i c0 = _mm256_add_epi64(set1_u64(base_block), _mm256_set_epi64x(3, 2, 1, 0));
    __m256i c1 = _mm256_setzero_si256();
    __m256i c2 = _mm256_setzero_si256();
    __m256i c3 = _mm256_setzero_si256();
    __m256i k0 = set1_u64(seed);
    __m256i k1 = set1_u64(stream);
    const __m256i w0 = set1_u64(kPhiloxW0);
    const __m256i w1 = set1_u64(kPhiloxW1);
    for (int round = 0;; ++round) {
        __m256i h0;
        __m256i l0;
        __m256i h1;
        __m256i l1;
        vmulhilo(m0, c0, &h0, &l0);
        vmulhilo(m1, c2, &h1, &l1);
        const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(h1, c1), k0);
        const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(h0, c3), k1);
        c0 = n0;
        c1 = l1;
        c2 = n2;
        c3 = l0;
        if (round == 9) {
            break;
        }
        k0 = _mm256_add_epi64(k0, w0);
        k1 = _mm256_add_epi64(k1, w1);
    }
    rows[0] = c0;
    rows[1] = c1;
    rows[2] = c2;
    rows[3] = c3;
}

// Rearranges rows-per-word into cols-per-block, so cols[j] holds the four
// consecutive draws of block base+j.
inline void transpose_blocks(const __m256i rows[4], __m256i cols[4]) {
    const __m256i t0 = _mm256_unpacklo_epi64(rows[0], rows[1]);
    const __m256i t1 = _mm256_unpackhi_epi64(rows[0], rows[1]);
    const __m256i t2 = _mm256_unpacklo_epi64(rows[2], rows[3]);
    const __m256i t3 = _mm256_unpackhi_epi64(rows[2], rows[3]);
    cols[0] = _mm256_permute2x128_si256(t0, t2, 0x20);
    cols[1] = _mm256_permute2x128_si256(t1, t3, 0x20);
    cols[2] = _mm256_permute2x128_si256(t0, t2, 0x31);
    cols[3] = _mm256_permute2x128_si256(t1, t3, 0x31);
}

// ((w >> 12) + 0.5) * 2^-52, all steps exact; matches u64_to_open_unit.
inline __m256d vopen_unit(__m256i w) {
    const __m256i sh = _mm256_srli_epi64(w, 12);
    const __m256d stacked =
        _mm256_castsi256_pd(_mm256_or_si256(sh, set1_u64(0x4330000000000000ull)));
    const __m256d d = _mm256_sub_pd(stacked, _mm256_set1_pd(0x1p52));
    return _mm256_mul_pd(_mm256_add_pd(d, _mm256_set1_pd(0.5)), _mm256_set1_pd(0x1p-52));
}

// Exact conversion of lane-wise small integers (|v| < 2^51) to double.
inline __m256d small_i64_to_double(__m256i v) {
    const __m256i shifted = _mm256_add_epi64(v, set1_u64(0x4338000000000000ull));
    return _mm256_sub_pd(_mm256_castsi256_pd(shifted), _mm256_set1_pd(0x1.8p52));
}

template <std::size_t N>
inline __m256d vhorner(const double (&coef)[N], __m256d x) {
    __m256d acc = _mm256_set1_pd(coef[N - 1]);
    for (std::size_t i = N - 1; i-- > 0;) {
        acc = _mm256_add_pd(_mm256_mul_pd(acc, x), _mm256_set1_pd(coef[i]));
    }
    return acc;
}

// log per lane; precondition: positive normal doubles (draw-derived inputs
// always are). Operation tree matches log_core.
inline __m256d vlog(__m256d x) {
    const LogConstants& lc = log_constants();
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i eint = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), set1_u64(1022));
    const __m256i mant = _mm256_or_si256(
        _mm256_and_si256(bits, set1_u64((std::uint64_t{1} << 52) - 1)),
        set1_u64(std::uint64_t{1022} << 52));
    __m256d m = _mm256_castsi256_pd(mant);
    __m256d e = small_i64_to_double(eint);
    const __m256d low = _mm256_cmp_pd(m, _mm256_set1_pd(lc.sqrt_half), _CMP_LT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(2.0)), low);
    e = _mm256_blendv_pd(e, _mm256_sub_pd(e, _mm256_set1_pd(1.0)), low);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d w = _mm256_mul_pd(s, s);
    __m256d p = _mm256_set1_pd(kLogCoef[10]);
    for (int i = 9; i >= 0; --i) {
        p = _mm256_add_pd(_mm256_mul_pd(p, w), _mm256_set1_pd(kLogCoef[i]));
    }
    const __m256d series = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), s), p);
    return _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(lc.ln2_hi)),
                         _mm256_add_pd(series, _mm256_mul_pd(e, _mm256_set1_pd(lc.ln2_lo))));
}

// exp per lane; matches exp_core including the underflow/overflow/NaN edges.
inline __m256d vexp(__m256d x) {
    const LogConstants& lc = log_constants();
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(lc.inv_ln2)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    const __m256d r =
        _mm256_sub_pd(_mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(lc.ln2_hi))),
                      _mm256_mul_pd(n, _mm256_set1_pd(lc.ln2_lo)));
    __m256d p = _mm256_set1_pd(kExpCoef[13]);
    for (int i = 12; i >= 0; --i) {
        p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kExpCoef[i]));
    }
    // 2^n assembled in the exponent field; valid on the lanes that survive
    // the range blends below.
    const __m256i shifted = _mm256_castpd_si256(_mm256_add_pd(n, _mm256_set1_pd(0x1.8p52)));
    const __m256i ni = _mm256_sub_epi64(shifted, set1_u64(0x4338000000000000ull));
    const __m256d scale =
        _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(ni, set1_u64(1023)), 52));
    __m256d res = _mm256_mul_pd(p, scale);
    res = _mm256_blendv_pd(res, _mm256_setzero_pd(),
                           _mm256_cmp_pd(x, _mm256_set1_pd(-708.0), _CMP_LT_OQ));
    res = _mm256_blendv_pd(res, _mm256_set1_pd(std::numeric_limits<double>::infinity()),
                           _mm256_cmp_pd(x, _mm256_set1_pd(708.0), _CMP_GT_OQ));
    res = _mm256_blendv_pd(res, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
    return res;
}

// Normal quantile per lane. Handles the central, mid and near-tail branches
// vectorially; lanes needing the deep tail (sqrt(-log z) >= 3, under 1e-4 of
// draws) are flagged in *fixup for a scalar-core pass. Matches
// normal_quantile_core on the lanes it completes.
inline __m256d vquantile(__m256d u, int* fixup) {
    const LogConstants& lc = log_constants();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d um = _mm256_min_pd(u, _mm256_sub_pd(one, u));
    const __m256d z = _mm256_mul_pd(_mm256_set1_pd(2.0), um);

    const __m256d pc = _mm256_sub_pd(one, z);
    const __m256d gc = _mm256_mul_pd(pc, _mm256_add_pd(pc, _mm256_set1_pd(10.0)));
    const __m256d rc = _mm256_div_pd(vhorner(kQuantCentralP, pc), vhorner(kQuantCentralQ, pc));
    const __m256d xc = _mm256_add_pd(_mm256_mul_pd(gc, _mm256_set1_pd(kQuantCentralY)),
                                     _mm256_mul_pd(gc, rc));

    const __m256d w = _mm256_xor_pd(vlog(z), _mm256_set1_pd(-0.0));

    const __m256d gm = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), w));
    const __m256d xsm = _mm256_sub_pd(z, _mm256_set1_pd(0.25));
    const __m256d rm = _mm256_div_pd(vhorner(kQuantMidP, xsm), vhorner(kQuantMidQ, xsm));
    const __m256d xm = _mm256_div_pd(gm, _mm256_add_pd(_mm256_set1_pd(kQuantMidY), rm));

    const __m256d t = _mm256_sqrt_pd(w);
    const __m256d xst = _mm256_sub_pd(t, _mm256_set1_pd(1.125));
    const __m256d rt = _mm256_div_pd(vhorner(kQuantTail3P, xst), vhorner(kQuantTail3Q, xst));
    const __m256d xt = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(kQuantTail3Y), t),
                                     _mm256_mul_pd(rt, t));

    __m256d x = xc;
    x = _mm256_blendv_pd(x, xm, _mm256_cmp_pd(z, half, _CMP_LT_OQ));
    x = _mm256_blendv_pd(x, xt, _mm256_cmp_pd(z, _mm256_set1_pd(0.25), _CMP_LT_OQ));
    *fixup = _mm256_movemask_pd(_mm256_cmp_pd(w, _mm256_set1_pd(9.0), _CMP_GE_OQ));

    const __m256d q = _mm256_mul_pd(_mm256_set1_pd(lc.sqrt_two), x);
    const __m256d qn = _mm256_xor_pd(q, _mm256_set1_pd(-0.0));
    return _mm256_blendv_pd(q, qn, _mm256_cmp_pd(u, half, _CMP_LT_OQ));
}

// Shared driver: scalar head until the index hits a block boundary, vector
// body of four blocks (16 draws) per iteration, scalar tail. `vtrans` maps
// a block's four raw words; `strans` is the bitwise-equal scalar transform.
template <typename VecTransform, typename ScalarTransform>
void avx2_batch(std::uint64_t seed, std::uint64_t stream, std::uint64_t first,
                std::size_t n, double* out, VecTransform vtrans,
                ScalarTransform strans) {
    std::uint64_t index = first;
    std::size_t k = 0;
    while (k < n && (index & 3) != 0) {
        out[k++] = strans(philox_draw(seed, stream, index));
        ++index;
    }
    while (n - k >= 16) {
        __m256i rows[4];
        __m256i cols[4];
        philox4_blocks(seed, stream, index >> 2, rows);
        transpose_blocks(rows, cols);
        for (int j = 0; j < 4; ++j) {
            vtrans(cols[j], out + k + 4 * static_cast<std::size_t>(j));
        }
        k += 16;
        index += 16;
    }
    while (k < n) {
        out[k++] = strans(philox_draw(seed, stream, index));
        ++index;
    }
}

}  // namespace

void avx2_batch_uniform(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t first, std::size_t n, double* out) {
    avx2_batch(
        seed, stream, first, n, out,
        [](__m256i words, double* dst) { _mm256_storeu_pd(dst, vopen_unit(words)); },
        [](std::uint64_t w) { return u64_to_open_unit(w); });
}

void avx2_batch_normal(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t first, std::size_t n, double* out) {
    avx2_batch(
        seed, stream, first, n, out,
        [](__m256i words, double* dst) {
            int fixup = 0;
            const __m256d q = vquantile(vopen_unit(words), &fixup);
            _mm256_storeu_pd(dst, q);
            if (fixup != 0) {
                alignas(32) std::uint64_t raw[4];
                _mm256_store_si256(reinterpret_cast<__m256i*>(raw), words);
                for (int lane = 0; lane < 4; ++lane) {
                    if (fixup & (1 << lane)) {
                        dst[lane] = normal_quantile_core(u64_to_open_unit(raw[lane]));
                    }
                }
            }
        },
        [](std::uint64_t w) { return normal_quantile_core(u64_to_open_unit(w)); });
}

void avx2_batch_exponential(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t first, std::size_t n, double mean,
                            double* out) {
    avx2_batch(
        seed, stream, first, n, out,
        [mean](__m256i words, double* dst) {
            _mm256_storeu_pd(dst, _mm256_mul_pd(_mm256_set1_pd(-mean), vlog(vopen_unit(words))));
        },
        [mean](std::uint64_t w) { return (-mean) * log_core(u64_to_open_unit(w)); });
}

void avx2_batch_exp(const double* x, std::size_t n, double* out) {
    std::size_t k = 0;
    for (; n - k >= 4; k += 4) {
        _mm256_storeu_pd(out + k, vexp(_mm256_loadu_pd(x + k)));
    }
    for (; k < n; ++k) {
        out[k] = exp_core(x[k]);
    }
}

}  // namespace ruinlab::kernels::detail
