#include "qtwtt/clock_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qtwtt/rng.hpp"

namespace qtwtt {

void ClockModel::validate() const
{
    const double fields[] = {x0_fs, y0, d_per_s, h_wfm_s, h_rwfm_per_s,
                             pps_offset_fs, env_amp, env_period_s};
    for (double f : fields)
        if (!std::isfinite(f))
            throw std::invalid_argument("ClockModel: non-finite parameter");
    if (h_wfm_s < 0 || h_rwfm_per_s < 0)
        throw std::invalid_argument("ClockModel: negative noise intensity");
    if (env_period_s <= 0)
        throw std::invalid_argument("ClockModel: env_period must be > 0");
}

ClockPhaseSeries simulate_clock(const ClockModel& model, double duration_s,
                                double step_s, std::uint64_t seed)
{
    model.validate();
    if (!(step_s > 0))
        throw std::invalid_argument("simulate_clock: step must be > 0");
    if (!(duration_s >= 2 * step_s))
        throw std::invalid_argument("simulate_clock: duration must cover >= 2 steps");

    const std::size_t n = static_cast<std::size_t>(std::floor(duration_s / step_s)) + 1;
    ClockPhaseSeries series;
    series.step_s = step_s;
    series.seed = seed;
    series.x_fs.resize(n);

    Rng rng(seed);
    // White FM: independent fractional frequency per step with variance
    // h_wfm / (2 step). RW FM: frequency random-walk with increment variance
    // h_rwfm * step. Both integrate into phase with the rectangle rule.
    const double wfm_sigma = std::sqrt(model.h_wfm_s / (2.0 * step_s));
    const double rw_sigma = std::sqrt(model.h_rwfm_per_s * step_s);
    const double two_pi = 2.0 * std::numbers::pi;

    double w_phase_fs = 0.0;  // accumulated stochastic phase
    double y_rw = 0.0;        // accumulated RW-FM frequency
    const bool noisy = model.h_wfm_s > 0 || model.h_rwfm_per_s > 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * step_s;
        double x = model.x0_fs + (model.y0 * t + 0.5 * model.d_per_s * t * t) * 1e15;
        if (model.env_amp != 0.0) {
            const double p = model.env_period_s;
            x += model.env_amp * (p / two_pi) * (1.0 - std::cos(two_pi * t / p)) * 1e15;
        }
        x += w_phase_fs;
        series.x_fs[k] = x;
        if (noisy && k + 1 < n) {
            const double y_step = rng.gaussian(wfm_sigma) + y_rw;
            w_phase_fs += y_step * step_s * 1e15;
            y_rw += rng.gaussian(rw_sigma);
        }
    }
    return series;
}

double clock_error_fs_at(const ClockPhaseSeries& series, double t_s)
{
    if (series.x_fs.size() < 2)
        throw std::invalid_argument("clock_error_fs_at: series too short");
    if (t_s < 0.0 || t_s > series.duration_s())
        throw std::out_of_range("clock_error_fs_at: query outside simulated span");
    const double pos = t_s / series.step_s;
    std::size_t k = static_cast<std::size_t>(pos);
    if (k >= series.x_fs.size() - 1) k = series.x_fs.size() - 2;
    const double frac = pos - static_cast<double>(k);
    return series.x_fs[k] + (series.x_fs[k + 1] - series.x_fs[k]) * frac;
}

Duration clock_error_at(const ClockPhaseSeries& series, TimeTag t, TimeTag epoch)
{
    return Duration::from_fs_double(clock_error_fs_at(series, elapsed_seconds(t, epoch)));
}

ClockModel preset(std::string_view name)
{
    ClockModel m;
    if (name == "hmaser") {
        // Ideal by convention: only relative quantities are observable, so
        // the full relative noise budget sits on the Rb model.
        return m;
    }
    if (name == "rb") {
        m.x0_fs = 2.5e8;           // 250 ns initial epoch offset
        m.y0 = 1.4e-11;            // fractional frequency offset vs the maser
        m.d_per_s = 1e-11;         // quadratic drift term recovered by the fits
        m.h_wfm_s = 2.904e-22;     // anchors ADEV(30 s) = 2.2e-12
        m.h_rwfm_per_s = 5e-29;    // calibrated long-tau floor (see README)
        m.env_amp = 1e-12;
        m.env_period_s = 2000.0;
        return m;
    }
    if (name == "transferred_ref") {
        m.h_wfm_s = 8.214e-28;     // anchors ADEV(30 s) = 3.7e-15
        return m;
    }
    throw std::invalid_argument("unknown clock preset '" + std::string(name) + "'");
}

} // namespace qtwtt
