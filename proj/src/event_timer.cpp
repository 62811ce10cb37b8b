#include "qtwtt/event_timer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qtwtt/rng.hpp"

namespace qtwtt {

void EventTimer::validate() const
{
    if (!(max_rate_per_port_hz > 0))
        throw std::invalid_argument("EventTimer: max_rate_per_port must be > 0");
    if (quantization_fs < 1)
        throw std::invalid_argument("EventTimer: quantization must be >= 1 fs");
    if (meas_jitter_sigma_fs < 0 || !std::isfinite(meas_jitter_sigma_fs))
        throw std::invalid_argument("EventTimer: bad measurement jitter");
}

namespace {

// Snap a tag to the quantization grid (grid anchored at whole seconds).
// Nearest multiple; exact femtosecond ties go to the even multiple.
TimeTag quantize_tag(TimeTag t, std::int64_t q)
{
    if (q <= 1) return t;
    const std::int64_t lo = t.frac_fs / q;
    const std::int64_t rem = t.frac_fs - lo * q;
    std::int64_t snapped;
    if (2 * rem < q)
        snapped = lo;
    else if (2 * rem > q)
        snapped = lo + 1;
    else
        snapped = (lo % 2 == 0) ? lo : lo + 1;
    const std::int64_t frac = snapped * q;
    if (frac >= kFsPerSecond)
        return TimeTag{t.seconds + 1, 0};
    return TimeTag{t.seconds, frac};
}

} // namespace

TagStream tag_events(const std::vector<TimeTag>& events, const EventTimer& timer, Port port,
                     const ClockPhaseSeries& freq_clock, const ClockPhaseSeries& pps_clock,
                     std::uint64_t seed, TimeTag epoch, std::optional<TimeTag>* carry)
{
    timer.validate();
    const double freq_origin_fs = clock_error_fs_at(freq_clock, 0.0);
    const double epoch_fs = clock_error_fs_at(pps_clock, 0.0);
    const double bias = timer.port_bias_fs(port);

    Rng rng(seed);
    std::vector<TimeTag> tags;
    tags.reserve(events.size());
    for (const TimeTag& ev : events) {
        const double t_s = elapsed_seconds(ev, epoch);
        const double rate_err = clock_error_fs_at(freq_clock, t_s) - freq_origin_fs;
        const double err = rate_err + epoch_fs + bias + rng.gaussian(timer.meas_jitter_sigma_fs);
        TimeTag tag = tag_add(ev, Duration::from_fs_double(err));
        tags.push_back(quantize_tag(tag, timer.quantization_fs));
    }
    std::sort(tags.begin(), tags.end());

    // Per-port sampling ceiling as non-paralyzable dead time on accepted tags.
    const Duration dead = Duration::from_fs_double(1e15 / timer.max_rate_per_port_hz);
    std::vector<TimeTag> kept;
    kept.reserve(tags.size());
    std::optional<TimeTag> last = carry ? *carry : std::nullopt;
    for (const TimeTag& t : tags) {
        if (last && tag_sub(t, *last) < dead) continue;
        kept.push_back(t);
        last = t;
    }
    if (carry) *carry = last;

    TagStream out;
    out.tags = std::move(kept);
    out.port = port;
    return out;
}

namespace {

// Both calibration procedures tag synthetic PPS pulses against a common
// ideal reference, so only biases, jitter and quantization remain.
struct PulsePair {
    TimeTag first;
    TimeTag second;
};

ClockPhaseSeries ideal_clock(double duration_s)
{
    return simulate_clock(ClockModel{}, duration_s, 1.0, 0);
}

std::vector<double> measure_offsets(const EventTimer& start_timer, Port start_port,
                                    const EventTimer& stop_timer, Port stop_port,
                                    const std::vector<PulsePair>& pulses,
                                    const ClockPhaseSeries& clk, std::uint64_t seed)
{
    std::vector<TimeTag> firsts, seconds;
    firsts.reserve(pulses.size());
    seconds.reserve(pulses.size());
    for (const auto& p : pulses) {
        firsts.push_back(p.first);
        seconds.push_back(p.second);
    }
    TagStream a = tag_events(firsts, start_timer, start_port, clk, clk, mix64(seed));
    TagStream b = tag_events(seconds, stop_timer, stop_port, clk, clk, mix64(seed ^ 0x5a5a));
    if (a.tags.size() != pulses.size() || b.tags.size() != pulses.size())
        throw std::runtime_error("calibration: pulse rate exceeds the port ceiling");
    std::vector<double> offsets(pulses.size());
    for (std::size_t i = 0; i < pulses.size(); ++i)
        offsets[i] = tag_sub(b.tags[i], a.tags[i]).to_fs_double();
    return offsets;
}

std::vector<PulsePair> pps_pulses(int count, Duration delay)
{
    std::vector<PulsePair> pulses(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const TimeTag t{i + 1, 0};
        pulses[static_cast<std::size_t>(i)] = {t, tag_add(t, delay)};
    }
    return pulses;
}

struct MeanSdAcc {
    double mean{0}, sd{0};
};

MeanSdAcc mean_sd(const std::vector<double>& v)
{
    double m = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return {m, std::sqrt(s / static_cast<double>(v.size() - 1))};
}

} // namespace

std::vector<CalibrationPoint> calibration_scan(const EventTimer& timer1,
                                               const EventTimer& timer2,
                                               const std::vector<Duration>& delays,
                                               int pulses_per_point, std::uint64_t seed)
{
    if (pulses_per_point < 2)
        throw std::invalid_argument("calibration_scan: need >= 2 pulses per point");
    const double span = pulses_per_point + 2.0;
    const ClockPhaseSeries clk = ideal_clock(span);
    std::vector<CalibrationPoint> out;
    out.reserve(delays.size());
    std::uint64_t idx = 0;
    for (const Duration& d : delays) {
        const auto pulses = pps_pulses(pulses_per_point, d);
        const auto o1 = measure_offsets(timer1, Port::A, timer1, Port::B, pulses, clk,
                                         derive_seed(seed, 0xca1, idx));
        const auto o2 = measure_offsets(timer2, Port::A, timer2, Port::B, pulses, clk,
                                         derive_seed(seed, 0xca2, idx));
        const auto m1 = mean_sd(o1);
        const auto m2 = mean_sd(o2);
        out.push_back({d, m1.mean, m1.sd, m2.mean, m2.sd});
        ++idx;
    }
    return out;
}

SixConfigResult six_config_homogeneity(const EventTimer& timer1, const EventTimer& timer2,
                                       Duration fixed_delay, int pulses_per_point,
                                       std::uint64_t seed)
{
    if (pulses_per_point < 2)
        throw std::invalid_argument("six_config_homogeneity: need >= 2 pulses per point");
    const double span = pulses_per_point + 2.0;
    const ClockPhaseSeries clk = ideal_clock(span);
    const auto pulses = pps_pulses(pulses_per_point, fixed_delay);

    struct Config {
        const char* label;
        const EventTimer* start;
        Port start_port;
        const EventTimer* stop;
        Port stop_port;
    };
    const Config configs[6] = {
        {"1A2A", &timer1, Port::A, &timer2, Port::A},
        {"1A2B", &timer1, Port::A, &timer2, Port::B},
        {"1B2A", &timer1, Port::B, &timer2, Port::A},
        {"1B2B", &timer1, Port::B, &timer2, Port::B},
        {"1A1B", &timer1, Port::A, &timer1, Port::B},
        {"2A2B", &timer2, Port::A, &timer2, Port::B},
    };

    SixConfigResult out;
    double lo = 0, hi = 0;
    for (int i = 0; i < 6; ++i) {
        const auto& c = configs[static_cast<std::size_t>(i)];
        const auto offsets = measure_offsets(*c.start, c.start_port, *c.stop, c.stop_port,
                                             pulses, clk,
                                             derive_seed(seed, 0x6c0, static_cast<std::uint64_t>(i)));
        const auto ms = mean_sd(offsets);
        out.rows[static_cast<std::size_t>(i)] = {c.label, ms.mean, ms.sd};
        if (i == 0) {
            lo = hi = ms.mean;
        } else {
            lo = std::min(lo, ms.mean);
            hi = std::max(hi, ms.mean);
        }
    }
    out.max_spread_fs = hi - lo;
    return out;
}

} // namespace qtwtt
