// Bulk draw generation: scalar reference kernels plus an AVX2 variant
// selected at runtime. Both variants implement the exact same arithmetic
// (same reductions, same polynomial evaluation order, no fused multiply-add)
// so their outputs are bitwise identical; the equivalence suite asserts it.
//
// Selection: the fastest supported variant wins by default. The environment
// variable RUINLAB_KERNEL overrides it with one of "scalar", "avx2", "auto".
#pragma once

#include <cstddef>
#include <cstdint>

namespace ruinlab::kernels {

enum class Isa {
    Scalar,
    Avx2,
};

// Variant used by the batch_* entry points, after applying the override.
Isa active_isa();

// Stable short name ("scalar", "avx2") for logs and diagnostics.
const char* isa_name(Isa isa);

// True when the CPU supports the given variant.
bool isa_supported(Isa isa);

// --- scalar cores ---------------------------------------------------------
// These are the reference definitions of every primitive the batch kernels
// vectorize. RngStream and all scalar simulation code call them too, which
// is what makes scalar paths and SIMD batch paths agree bitwise.

// Four output words of the philox4x64-10 bijection for the given key pair
// (seed, stream) at counter (block, 0, 0, 0).
void philox_block(std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t block, std::uint64_t out[4]);

// Raw draw `index` of a stream (word index & 3 of block index >> 2).
std::uint64_t philox_draw(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index);

// Maps a raw word to the open interval (0, 1): ((w >> 12) + 0.5) * 2^-52.
// Every result is exactly representable and strictly inside the interval.
double u64_to_open_unit(std::uint64_t w);

// Natural logarithm for finite x > 0. Identical bit-for-bit with the AVX2
// vector evaluation; accuracy ~2 ulp.
double log_core(double x);

// exp(x) for |x| <= 708; same bitwise-equality contract as log_core.
double exp_core(double x);

// Standard normal quantile on the open unit interval; the sampling core
// behind every normal draw in the library. Same contract as log_core.
double normal_quantile_core(double u);

// --- batch entry points (runtime dispatched) ------------------------------
// Fill out[0..n) with transformed draws `first .. first+n-1` of the stream.
// Calling a batch function twice with split ranges yields exactly the
// concatenation of one full-range call.

void batch_uniform(std::uint64_t seed, std::uint64_t stream,
                   std::uint64_t first, std::size_t n, double* out);

void batch_normal(std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first, std::size_t n, double* out);

void batch_exponential(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t first, std::size_t n, double mean,
                       double* out);

// exp() applied elementwise to a caller-provided array (used by the
// Brownian-bridge crossing corrections in the simulation oracles).
void batch_exp(const double* x, std::size_t n, double* out);

// Forced-variant entry points for the equivalence tests.
void batch_uniform_with(Isa isa, std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t first, std::size_t n, double* out);
void batch_normal_with(Isa isa, std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t first, std::size_t n, double* out);
void batch_exponential_with(Isa isa, std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t first, std::size_t n, double mean,
                            double* out);
void batch_exp_with(Isa isa, const double* x, std::size_t n, double* out);

}  // namespace ruinlab::kernels
