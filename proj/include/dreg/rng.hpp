#pragma once

#include <cmath>
#include <cstdint>

namespace dreg {

// Generator version 1. All randomness in the project flows through this
// splitmix64 generator and its stream-splitting scheme; bumping the mixing
// constants or the stream derivation requires bumping this version.
inline constexpr int kRngVersion = 1;

// splitmix64 (Steele, Lea, Flood 2014 mixing constants).
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log argument.
    double uniform01_open_left() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). n must be >= 1.
    std::uint64_t uniform_index(std::uint64_t n) { return next() % n; }

    // Standard normal via Box-Muller; two fresh uniforms per draw so the
    // stream position is input-independent.
    double normal() {
        const double u1 = uniform01_open_left();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    double normal(double mean, double std) { return mean + std * normal(); }

  private:
    std::uint64_t state_;
};

// Stream tags. Each logical source of randomness gets its own tag so that
// e.g. enlarging a dataset never perturbs the bags already generated.
namespace stream_tag {
inline constexpr std::uint64_t bag_params = 0x01;
inline constexpr std::uint64_t bag_samples = 0x02;
inline constexpr std::uint64_t label_noise = 0x03;
inline constexpr std::uint64_t anchors = 0x04;
inline constexpr std::uint64_t sgd_batch = 0x05;
inline constexpr std::uint64_t pair_sampling = 0x06;
inline constexpr std::uint64_t trial = 0x07;
inline constexpr std::uint64_t test_set = 0x08;
}  // namespace stream_tag

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    SplitMix64 g(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
    return g.next();
}

// Independent stream keyed by (seed, tag, index).
inline SplitMix64 make_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    return SplitMix64(mix_seed(mix_seed(seed, tag), index));
}

}  // namespace dreg
