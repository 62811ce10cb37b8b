#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "qtwtt/timebase.hpp"

namespace qtwtt {

/// Two-state clock error model plus a sinusoidal environmental frequency
/// modulation. The time error in seconds is
///   x(t) = x0 + y0 t + (d/2) t^2
///        + env_amp (env_period / 2 pi) (1 - cos(2 pi t / env_period))
///        + W(t)
/// where W integrates white-FM and random-walk-FM noise.
struct ClockModel {
    double x0_fs{0};          ///< initial time offset
    double y0{0};             ///< fractional frequency offset
    double d_per_s{0};        ///< fractional frequency drift rate
    double h_wfm_s{0};        ///< white-FM intensity; sigma_y(tau)=sqrt(h/(2 tau))
    double h_rwfm_per_s{0};   ///< RW-FM frequency diffusion; sigma_y(tau)=sqrt(h tau/3)
    double pps_offset_fs{0};  ///< fixed epoch offset of the 1 PPS output
    double env_amp{0};        ///< sinusoidal FM amplitude (fractional frequency)
    double env_period_s{2000.0};

    void validate() const;
};

/// Sampled realization of x(t) on a uniform grid starting at the session
/// epoch. Immutable after construction; regenerating with the same model,
/// seed and step is bit-exact.
struct ClockPhaseSeries {
    double step_s{0};
    std::vector<double> x_fs;
    std::uint64_t seed{0};

    double duration_s() const { return step_s * static_cast<double>(x_fs.size() - 1); }
};

ClockPhaseSeries simulate_clock(const ClockModel& model, double duration_s,
                                double step_s, std::uint64_t seed);

/// Linearly interpolated time error at elapsed seconds since the epoch.
/// Exact at sample points. Throws std::out_of_range outside the span.
double clock_error_fs_at(const ClockPhaseSeries& series, double t_s);

/// Same, keyed by TimeTag relative to an epoch tag and rounded to integer
/// femtoseconds.
Duration clock_error_at(const ClockPhaseSeries& series, TimeTag t, TimeTag epoch = kEpoch);

/// Named presets:
///  - "hmaser": ideal reference (all relative noise is booked on the Rb side)
///  - "rb": Rb clock relative to the H-maser
///  - "transferred_ref": fiber-transferred 10 MHz reference residual
ClockModel preset(std::string_view name);

} // namespace qtwtt
