#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vac {

// Algorithm recorded in output metadata; bit-reproducible on one platform.
inline constexpr const char* kRngAlgorithm = "mt19937_64/splitmix64-derive/box-muller";

// splitmix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream seed for trajectory `stream_index` under root `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_index) {
    return splitmix64(seed ^ splitmix64(stream_index + 1));
}

// Standard normal generator with an explicit Box-Muller transform so the
// variate stream does not depend on the standard library's distribution
// implementation.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 in [0,1) => 1-u1 in (0,1]
        double z0 = r * std::cos(2.0 * M_PI * u2);
        spare_ = r * std::sin(2.0 * M_PI * u2);
        has_spare_ = true;
        return z0;
    }

private:
    double uniform01() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace vac
