#include "qtwtt/photon_source.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qtwtt/rng.hpp"

namespace qtwtt {

PairStream generate_pairs(double pair_rate_hz, double duration_s,
                          double correlation_sigma_fs, std::uint64_t seed,
                          TimeTag start)
{
    if (!(pair_rate_hz > 0))
        throw std::invalid_argument("generate_pairs: pair_rate must be > 0");
    if (duration_s < 0 || !std::isfinite(duration_s))
        throw std::invalid_argument("generate_pairs: bad duration");
    if (correlation_sigma_fs < 0)
        throw std::invalid_argument("generate_pairs: negative correlation sigma");

    PairStream out;
    out.pair_rate_hz = pair_rate_hz;
    out.correlation_sigma_fs = correlation_sigma_fs;
    if (duration_s == 0)
        return out;

    Rng rng(seed);
    const double arm_sigma = correlation_sigma_fs / std::sqrt(2.0);
    const std::size_t expect = static_cast<std::size_t>(pair_rate_hz * duration_s * 1.1) + 16;
    out.emission.reserve(expect);
    out.signal_arm.reserve(expect);
    out.idler_arm.reserve(expect);

    double t = 0.0;  // seconds into the chunk; fs offsets stay exact below
    for (;;) {
        t += rng.exponential(pair_rate_hz);
        if (t >= duration_s) break;
        const Duration offset = Duration::from_fs_double(t * 1e15);
        const TimeTag e = tag_add(start, offset);
        out.emission.push_back(e);
        out.signal_arm.push_back(tag_add(e, Duration::from_fs_double(rng.gaussian(arm_sigma))));
        out.idler_arm.push_back(tag_add(e, Duration::from_fs_double(rng.gaussian(arm_sigma))));
    }
    return out;
}

void DetectorModel::validate() const
{
    if (!(efficiency >= 0.0 && efficiency <= 1.0))
        throw std::invalid_argument("DetectorModel: efficiency outside [0,1]");
    if (jitter_sigma_fs < 0 || !std::isfinite(jitter_sigma_fs))
        throw std::invalid_argument("DetectorModel: bad jitter sigma");
    if (dark_rate_hz < 0 || !std::isfinite(dark_rate_hz))
        throw std::invalid_argument("DetectorModel: bad dark rate");
}

DetectionStream detect(const std::vector<TimeTag>& photons, const DetectorModel& det,
                       std::uint64_t seed, int channel,
                       double dark_span_start_s, double dark_span_s, TimeTag* carry)
{
    det.validate();
    Rng rng(seed);
    DetectionStream out;
    out.channel = channel;
    out.times.reserve(static_cast<std::size_t>(photons.size() * det.efficiency) + 16);

    for (const TimeTag& p : photons) {
        if (!rng.bernoulli(det.efficiency)) continue;
        out.times.push_back(tag_add(p, Duration::from_fs_double(rng.gaussian(det.jitter_sigma_fs))));
    }
    if (det.dark_rate_hz > 0 && dark_span_s > 0) {
        double t = dark_span_start_s;
        for (;;) {
            t += rng.exponential(det.dark_rate_hz);
            if (t >= dark_span_start_s + dark_span_s) break;
            out.times.push_back(tag_add(kEpoch, Duration::from_fs_double(t * 1e15)));
        }
    }
    std::sort(out.times.begin(), out.times.end());

    // Non-paralyzable dead time on kept events.
    if (det.dead_time.fs > 0 && !out.times.empty()) {
        std::vector<TimeTag> kept;
        kept.reserve(out.times.size());
        bool have_last = carry != nullptr && (carry->seconds != 0 || carry->frac_fs != 0);
        TimeTag last = have_last ? *carry : TimeTag{};
        for (const TimeTag& t : out.times) {
            if (have_last && tag_sub(t, last) < det.dead_time) continue;
            kept.push_back(t);
            last = t;
            have_last = true;
        }
        out.times = std::move(kept);
        if (carry && have_last) *carry = last;
    }
    return out;
}

} // namespace qtwtt
