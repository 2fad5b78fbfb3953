// Runtime selection between the scalar reference kernels and the AVX2
// variant. Because the variants are bitwise identical, selection never
// changes results, only throughput.
#include "ruinlab/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "internal.hpp"

namespace ruinlab::kernels {

namespace {

bool cpu_has_avx2() {
    return __builtin_cpu_supports("avx2") != 0;
}

}  // namespace

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
            return cpu_has_avx2();
    }
    return false;
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Avx2:
            return "avx2";
        case Isa::Scalar:
            break;
    }
    return "scalar";
}

Isa active_isa() {
    // Read the override on every call so tests can flip it; the lookup is
    // trivial next to any batch large enough to be worth dispatching.
    const char* env = std::getenv("RUINLAB_KERNEL");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) {
            return Isa::Scalar;
        }
        if (std::strcmp(env, "avx2") == 0) {
            // An unsupported request degrades to scalar rather than failing:
            // the variants agree bitwise, so only speed is at stake.
            return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
        }
        // Anything else, including "auto", falls through to detection.
    }
    return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

void batch_uniform_with(Isa isa, std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t first, std::size_t n, double* out) {
    if (isa == Isa::Avx2 && isa_supported(Isa::Avx2)) {
        detail::avx2_batch_uniform(seed, stream, first, n, out);
    } else {
        detail::scalar_batch_uniform(seed, stream, first, n, out);
    }
}

void batch_normal_with(Isa isa, std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t first, std::size_t n, double* out) {
    if (isa == Isa::Avx2 && isa_supported(Isa::Avx2)) {
        detail::avx2_batch_normal(seed, stream, first, n, out);
    } else {
        detail::scalar_batch_normal(seed, stream, first, n, out);
    }
}

void batch_exponential_with(Isa isa, std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t first, std::size_t n, double mean,
                            double* out) {
    if (isa == Isa::Avx2 && isa_supported(Isa::Avx2)) {
        detail::avx2_batch_exponential(seed, stream, first, n, mean, out);
    } else {
        detail::scalar_batch_exponential(seed, stream, first, n, mean, out);
    }
}

void batch_exp_with(Isa isa, const double* x, std::size_t n, double* out) {
    if (isa == Isa::Avx2 && isa_supported(Isa::Avx2)) {
        detail::avx2_batch_exp(x, n, out);
    } else {
        detail::scalar_batch_exp(x, n, out);
    }
}

void batch_uniform(std::uint64_t seed, std::uint64_t stream,
                   std::uint64_t first, std::size_t n, double* out) {
    batch_uniform_with(active_isa(), seed, stream, first, n, out);
}

void batch_normal(std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first, std::size_t n, double* out) {
    batch_normal_with(active_isa(), seed, stream, first, n, out);
}

void batch_exponential(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t first, std::size_t n, double mean,
                       double* out) {
    batch_exponential_with(active_isa(), seed, stream, first, n, mean, out);
}

void batch_exp(const double* x, std::size_t n, double* out) {
    batch_exp_with(active_isa(), x, n, out);
}

}  // namespace ruinlab::kernels
