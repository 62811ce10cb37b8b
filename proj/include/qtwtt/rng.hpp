#pragma once

#include <cstdint>
#include <random>

namespace qtwtt {

/// splitmix64 mixing step; used only to derive well-separated seeds.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic per-stream, per-window seed derivation. Every random
/// consumer in a run owns a (stream, index) pair, so results do not depend
/// on scheduling or batch size.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index = 0)
{
    return mix64(mix64(master ^ mix64(stream)) ^ mix64(index * 0x9e3779b97f4a7c15ULL + 1));
}

/// Named random stream ids (arbitrary distinct constants).
enum class RngStream : std::uint64_t {
    pairs_ntsc = 0x11,
    pairs_lso = 0x12,
    detector_d1 = 0x21,
    detector_d2 = 0x22,
    detector_d3 = 0x23,
    detector_d4 = 0x24,
    channel_fwd = 0x31,
    channel_bwd = 0x32,
    timer_et1_a = 0x41,
    timer_et1_b = 0x42,
    timer_et2_a = 0x43,
    timer_et2_b = 0x44,
    clock_ntsc = 0x51,
    clock_lso = 0x52,
    clock_transferred = 0x53,
    synthetic = 0x61,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, RngStream stream,
                                    std::uint64_t index = 0)
{
    return derive_seed(master, static_cast<std::uint64_t>(stream), index);
}

/// Thin wrapper around mt19937_64 with the few draws the simulator needs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return uni_(eng_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uni_(eng_); }

    /// N(0, sigma); returns exactly 0.0 without consuming state when
    /// sigma <= 0, so noiseless configs stay bit-exact.
    double gaussian(double sigma)
    {
        if (sigma <= 0.0) return 0.0;
        return sigma * norm_(eng_);
    }

    /// Exponential with the given rate (events per unit).
    double exponential(double rate) { return -std::log1p(-uni_(eng_)) / rate; }

    bool bernoulli(double p)
    {
        if (p >= 1.0) return true;
        if (p <= 0.0) return false;
        return uni_(eng_) < p;
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    std::uniform_real_distribution<double> uni_{0.0, 1.0};
    std::normal_distribution<double> norm_{0.0, 1.0};
};

} // namespace qtwtt
