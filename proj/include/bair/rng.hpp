#pragma once

#include <cstdint>
#include <random>

namespace bair {

// Mixes a 64-bit value into a well-dispersed successor (splitmix64 step).
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives a child seed as a pure function of a master seed and up to three
// coordinates (e.g. instance index, replication index, algorithm id), so
// execution order can never change which stream a consumer receives.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = mix64(master ^ 0x6a09e667f3bcc908ULL);
    s = mix64(s ^ mix64(a));
    s = mix64(s ^ mix64(b));
    s = mix64(s ^ mix64(c));
    return s;
}

// Seeded random stream. Identical seeds give identical draw sequences for
// the lifetime of the process binary. Single-owner: never share one stream
// between concurrent consumers.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), gen_(mix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    double normal() {
        std::normal_distribution<double> dist(0.0, 1.0);
        return dist(gen_);
    }

    double uniform01() {
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        return dist(gen_);
    }

    // Uniform draw from {0, ..., n-1}.
    int uniform_int(int n) {
        std::uniform_int_distribution<int> dist(0, n - 1);
        return dist(gen_);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

// Fixed tags for the substreams a single simulation run owns.
namespace stream_tag {
inline constexpr std::uint64_t kReward = 0x52455741;
inline constexpr std::uint64_t kUserNoise = 0x4e4f4953;
inline constexpr std::uint64_t kPolicy = 0x504f4c49;
inline constexpr std::uint64_t kInstanceGen = 0x494e5354;
}  // namespace stream_tag

}  // namespace bair
