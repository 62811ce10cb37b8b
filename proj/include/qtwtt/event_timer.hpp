#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qtwtt/clock_model.hpp"
#include "qtwtt/timebase.hpp"

namespace qtwtt {

enum class Port { A, B };

/// Event timer with two rate-limited input ports. Tagging converts a true
/// event time into the local clock frame:
///   tag = t + [x_freq(t) - x_freq(0)] + [x_pps(0) + pps_offset] + port bias
///         + measurement jitter, rounded to the quantization grid.
/// The 10 MHz reference drives the running rate (incremental error since the
/// session epoch); the 1 PPS reference pins the epoch once at session start.
struct EventTimer {
    double port_bias_a_fs{0};
    double port_bias_b_fs{0};
    double meas_jitter_sigma_fs{5'500};  ///< per-channel tagging jitter
    std::int64_t quantization_fs{1'000}; ///< 1 ps grid
    double max_rate_per_port_hz{6'000};
    std::string freq_ref{"hmaser"};
    std::string pps_ref{"hmaser"};

    void validate() const;
    double port_bias_fs(Port p) const { return p == Port::A ? port_bias_a_fs : port_bias_b_fs; }
};

struct TagStream {
    std::vector<TimeTag> tags;
    Port port{Port::A};
    int timer_id{0};
    int channel{0};
};

/// Tag a sorted true-time event sequence through one port. Events arriving
/// within 1/max_rate_per_port of the previously accepted tag on the port are
/// dropped (dead-time model of the per-port sampling ceiling). `carry` chains
/// the dead-time state across window chunks.
TagStream tag_events(const std::vector<TimeTag>& events, const EventTimer& timer, Port port,
                     const ClockPhaseSeries& freq_clock, const ClockPhaseSeries& pps_clock,
                     std::uint64_t seed, TimeTag epoch = kEpoch,
                     std::optional<TimeTag>* carry = nullptr);

/// One row of the two-PPS delay scan: both timers tag a pulse pair separated
/// by the preset delay (first pulse on port A, second on port B) and report
/// the mean and SD of tag_B - tag_A.
struct CalibrationPoint {
    Duration preset_delay;
    double mean1_fs{0};
    double sd1_fs{0};
    double mean2_fs{0};
    double sd2_fs{0};
};

std::vector<CalibrationPoint> calibration_scan(const EventTimer& timer1,
                                               const EventTimer& timer2,
                                               const std::vector<Duration>& delays,
                                               int pulses_per_point, std::uint64_t seed);

/// Start/stop homogeneity across the six port pairings of two timers at a
/// fixed delay: 1A2A, 1A2B, 1B2A, 1B2B, 1A1B, 2A2B.
struct SixConfigRow {
    std::string label;
    double mean_fs{0};
    double sd_fs{0};
};

struct SixConfigResult {
    std::array<SixConfigRow, 6> rows;
    double max_spread_fs{0};  ///< max - min of the six means
};

SixConfigResult six_config_homogeneity(const EventTimer& timer1, const EventTimer& timer2,
                                       Duration fixed_delay, int pulses_per_point,
                                       std::uint64_t seed);

} // namespace qtwtt
