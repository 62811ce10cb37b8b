#pragma once

#include <cstdint>
#include <vector>

#include "qtwtt/timebase.hpp"

namespace qtwtt {

/// Statistical surrogate for a time-energy entangled pair source: Poissonian
/// emission, each pair splitting into a signal and an idler photon whose
/// arm-difference spread is correlation_sigma.
struct PairStream {
    std::vector<TimeTag> emission;
    std::vector<TimeTag> signal_arm;
    std::vector<TimeTag> idler_arm;
    double pair_rate_hz{0};
    double correlation_sigma_fs{0};
};

/// Poisson pair process over [start, start + duration). Each arm time is
/// emission + N(0, correlation_sigma / sqrt(2)), independent per arm, so the
/// signal-idler difference has spread correlation_sigma. Deterministic per
/// seed; restarting at window boundaries keeps the process exactly Poisson.
PairStream generate_pairs(double pair_rate_hz, double duration_s,
                          double correlation_sigma_fs, std::uint64_t seed,
                          TimeTag start = kEpoch);

struct DetectorModel {
    double efficiency{0.65};
    double jitter_sigma_fs{51'000};  ///< 51 ps SNSPD timing jitter
    double dark_rate_hz{0};
    Duration dead_time{Duration::from_ns(20)};

    void validate() const;
};

struct DetectionStream {
    std::vector<TimeTag> times;
    int channel{0};
};

/// Thin each photon by the detection efficiency, smear by Gaussian jitter,
/// add dark counts, sort, and drop events within the dead time of the
/// previously kept event. `carry` lets a caller chain window chunks so the
/// dead-time filter spans chunk boundaries.
DetectionStream detect(const std::vector<TimeTag>& photons, const DetectorModel& det,
                       std::uint64_t seed, int channel = 0,
                       double dark_span_start_s = 0.0, double dark_span_s = 0.0,
                       TimeTag* carry = nullptr);

} // namespace qtwtt
