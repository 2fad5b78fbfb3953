#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "ruinlab/kernels.hpp"
#include "ruinlab/numerics.hpp"

#include "data/philox_kat.inc"

using namespace ruinlab;
using Catch::Matchers::WithinRel;

namespace {

// Scoped environment override for the kernel selection tests; restores the
// previous value on destruction so test order never matters.
class ScopedEnv {
public:
    ScopedEnv(const char* name, const char* value) : name_(name) {
        const char* old = std::getenv(name);
        had_old_ = old != nullptr;
        if (had_old_) {
            old_ = old;
        }
        if (value != nullptr) {
            ::setenv(name, value, 1);
        } else {
            ::unsetenv(name);
        }
    }
    ~ScopedEnv() {
        if (had_old_) {
            ::setenv(name_.c_str(), old_.c_str(), 1);
        } else {
            ::unsetenv(name_.c_str());
        }
    }

private:
    std::string name_;
    std::string old_;
    bool had_old_ = false;
};

std::vector<double> batch_with(kernels::Isa isa, std::uint64_t seed,
                               std::uint64_t stream, std::uint64_t first,
                               std::size_t n) {
    std::vector<double> out(n);
    kernels::batch_uniform_with(isa, seed, stream, first, n, out.data());
    return out;
}

}  // namespace

TEST_CASE("philox counter block cipher") {
    SECTION("matches the known-answer vectors") {
        for (const auto& row : kPhiloxKat) {
            INFO("seed=" << row.seed << " stream=" << row.stream
                         << " block=" << row.block);
            std::uint64_t out[4];
            kernels::philox_block(row.seed, row.stream, row.block, out);
            for (int i = 0; i < 4; ++i) {
                CHECK(out[i] == row.out[i]);
            }
        }
    }
    SECTION("indexed draws address words within blocks") {
        for (const auto& row : kPhiloxKat) {
            if (row.block >= (std::uint64_t{1} << 62)) {
                continue;  // block * 4 + i would wrap the draw index
            }
            for (std::uint64_t i = 0; i < 4; ++i) {
                CHECK(kernels::philox_draw(row.seed, row.stream,
                                           row.block * 4 + i) == row.out[i]);
            }
        }
    }
    SECTION("different keys decorrelate the same counter") {
        std::uint64_t a[4];
        std::uint64_t b[4];
        kernels::philox_block(1, 0, 9, a);
        kernels::philox_block(2, 0, 9, b);
        CHECK(a[0] != b[0]);
        kernels::philox_block(1, 1, 9, b);
        CHECK(a[0] != b[0]);
    }
}

TEST_CASE("unit interval mapping") {
    SECTION("extremes stay strictly inside the interval") {
        CHECK(kernels::u64_to_open_unit(0) > 0.0);
        CHECK(kernels::u64_to_open_unit(~std::uint64_t{0}) < 1.0);
        CHECK(kernels::u64_to_open_unit(0) ==
              std::ldexp(0.5, -52));
        CHECK(kernels::u64_to_open_unit(~std::uint64_t{0}) ==
              std::ldexp((1ull << 52) - 1 + 0.5, -52));
    }
    SECTION("mapping is monotone in the raw word") {
        const std::uint64_t words[] = {0,           1ull << 12, 1ull << 32,
                                       1ull << 50,  1ull << 63, ~std::uint64_t{0}};
        for (std::size_t i = 1; i < std::size(words); ++i) {
            CHECK(kernels::u64_to_open_unit(words[i - 1]) <=
                  kernels::u64_to_open_unit(words[i]));
        }
    }
}

TEST_CASE("transcendental cores") {
    SECTION("logarithm core tracks the library function") {
        const double xs[] = {1e-300, 1e-10, 0.1,    0.5,  1.0 - 1e-9, 1.0,
                             1.0 + 1e-9, 2.0, 10.0, 1e10, 1e300};
        for (double x : xs) {
            INFO("x=" << x);
            if (x == 1.0) {
                CHECK(kernels::log_core(x) == 0.0);
            } else {
                CHECK_THAT(kernels::log_core(x),
                           WithinRel(std::log(x), 2e-15));
            }
        }
    }
    SECTION("exponential core tracks the library function") {
        const double xs[] = {-708.0, -100.0, -1.0, -1e-9, 0.0,
                             1e-9,   1.0,    100.0, 708.0};
        for (double x : xs) {
            INFO("x=" << x);
            CHECK_THAT(kernels::exp_core(x), WithinRel(std::exp(x), 2e-15));
        }
    }
    SECTION("exp undoes log") {
        for (double x = 0.25; x <= 64.0; x *= 2.0) {
            CHECK_THAT(kernels::exp_core(kernels::log_core(x)),
                       WithinRel(x, 1e-14));
        }
    }
    SECTION("quantile core is the library quantile") {
        for (double p = 0.01; p < 1.0; p += 0.0617) {
            CHECK(kernels::normal_quantile_core(p) ==
                  numerics::normal_quantile(p));
        }
    }
    SECTION("quantile core is monotone") {
        double prev = kernels::normal_quantile_core(1e-12);
        for (double p = 1e-6; p < 1.0 - 1e-7; p += 0.013) {
            const double q = kernels::normal_quantile_core(p);
            CHECK(q > prev);
            prev = q;
        }
    }
}

TEST_CASE("batch draws agree with sequential streams") {
    const std::uint64_t seed = 97;
    const std::uint64_t stream = 13;
    const std::size_t n = 1000;

    SECTION("uniform") {
        std::vector<double> batch(n);
        kernels::batch_uniform(seed, stream, 0, n, batch.data());
        numerics::RngStream rng(seed, stream);
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(batch[i] == rng.next_uniform());
        }
    }
    SECTION("normal") {
        std::vector<double> batch(n);
        kernels::batch_normal(seed, stream, 0, n, batch.data());
        numerics::RngStream rng(seed, stream);
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(batch[i] == rng.next_normal());
        }
    }
    SECTION("exponential") {
        const double mean = 1.7;
        std::vector<double> batch(n);
        kernels::batch_exponential(seed, stream, 0, n, mean, batch.data());
        numerics::RngStream rng(seed, stream);
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(batch[i] == rng.next_exponential(mean));
        }
    }
    SECTION("split ranges concatenate exactly") {
        std::vector<double> whole(n);
        kernels::batch_uniform(seed, stream, 0, n, whole.data());
        for (std::size_t cut : {std::size_t{1}, std::size_t{5},
                                std::size_t{7}, std::size_t{512}}) {
            std::vector<double> head(cut);
            std::vector<double> tail(n - cut);
            kernels::batch_uniform(seed, stream, 0, cut, head.data());
            kernels::batch_uniform(seed, stream, cut, n - cut, tail.data());
            for (std::size_t i = 0; i < cut; ++i) {
                REQUIRE(head[i] == whole[i]);
            }
            for (std::size_t i = 0; i < n - cut; ++i) {
                REQUIRE(tail[i] == whole[cut + i]);
            }
        }
    }
}

TEST_CASE("vector and scalar kernels are bitwise identical") {
    if (!kernels::isa_supported(kernels::Isa::Avx2)) {
        WARN("AVX2 not supported on this host; equivalence suite skipped");
        return;
    }
    const std::size_t n = 1037;  // odd size exercises the remainder lanes

    SECTION("uniform, including unaligned offsets") {
        for (std::uint64_t first : {0ull, 1ull, 3ull, 7ull}) {
            const auto s = batch_with(kernels::Isa::Scalar, 5, 2, first, n);
            const auto v = batch_with(kernels::Isa::Avx2, 5, 2, first, n);
            for (std::size_t i = 0; i < n; ++i) {
                REQUIRE(s[i] == v[i]);
            }
        }
    }
    SECTION("normal") {
        std::vector<double> s(n);
        std::vector<double> v(n);
        kernels::batch_normal_with(kernels::Isa::Scalar, 8, 0, 11, n, s.data());
        kernels::batch_normal_with(kernels::Isa::Avx2, 8, 0, 11, n, v.data());
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(s[i] == v[i]);
        }
    }
    SECTION("exponential") {
        std::vector<double> s(n);
        std::vector<double> v(n);
        kernels::batch_exponential_with(kernels::Isa::Scalar, 8, 1, 0, n, 2.3,
                                        s.data());
        kernels::batch_exponential_with(kernels::Isa::Avx2, 8, 1, 0, n, 2.3,
                                        v.data());
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(s[i] == v[i]);
        }
    }
    SECTION("elementwise exponential") {
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = -700.0 + 1.35 * static_cast<double>(i);
        }
        std::vector<double> s(n);
        std::vector<double> v(n);
        kernels::batch_exp_with(kernels::Isa::Scalar, xs.data(), n, s.data());
        kernels::batch_exp_with(kernels::Isa::Avx2, xs.data(), n, v.data());
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(s[i] == v[i]);
            REQUIRE(s[i] == kernels::exp_core(xs[i]));
        }
    }
}

TEST_CASE("kernel selection override") {
    SECTION("explicit scalar wins") {
        ScopedEnv env("RUINLAB_KERNEL", "scalar");
        CHECK(kernels::active_isa() == kernels::Isa::Scalar);
    }
    SECTION("explicit vector request honors hardware support") {
        ScopedEnv env("RUINLAB_KERNEL", "avx2");
        if (kernels::isa_supported(kernels::Isa::Avx2)) {
            CHECK(kernels::active_isa() == kernels::Isa::Avx2);
        } else {
            CHECK(kernels::active_isa() == kernels::Isa::Scalar);
        }
    }
    SECTION("auto and unknown values fall back to detection") {
        const kernels::Isa detected = [] {
            ScopedEnv env("RUINLAB_KERNEL", nullptr);
            return kernels::active_isa();
        }();
        {
            ScopedEnv env("RUINLAB_KERNEL", "auto");
            CHECK(kernels::active_isa() == detected);
        }
        {
            ScopedEnv env("RUINLAB_KERNEL", "bogus");
            CHECK(kernels::active_isa() == detected);
        }
    }
    SECTION("names are stable") {
        CHECK(std::string(kernels::isa_name(kernels::Isa::Scalar)) ==
              "scalar");
        CHECK(std::string(kernels::isa_name(kernels::Isa::Avx2)) == "avx2");
        CHECK(kernels::isa_supported(kernels::Isa::Scalar));
    }
}
