#include "qtwtt/sync_engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace qtwtt {

std::pair<std::size_t, std::size_t> SyncSeries::longest_valid_run() const
{
    std::size_t best_start = 0, best_len = 0;
    std::size_t start = 0, len = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].valid) {
            if (len == 0) start = i;
            ++len;
            if (len > best_len) {
                best_len = len;
                best_start = start;
            }
        } else {
            len = 0;
        }
    }
    return {best_start, best_len};
}

namespace {

/// Per-direction coarse lock plus centroid tracker.
class DirectionTracker {
public:
    explicit DirectionTracker(const SyncParams& params) : params_(params) {}

    /// Returns the fitted result for this window, or an empty one on gap.
    CoincidenceResult process(const std::vector<TimeTag>& local,
                              const std::vector<TimeTag>& remote)
    {
        CoincidenceResult empty;
        if (local.empty() || remote.empty()) {
            locked_ = false;
            have_prev_ = have_prev2_ = false;
            return empty;
        }
        if (!locked_) {
            auto coarse = coarse_offset(local, remote, params_.coarse);
            if (!coarse) return empty;
            center_ = coarse->lag;
            locked_ = true;
            have_prev_ = have_prev2_ = false;
        }
        CoincidenceResult hist =
            coincidence_histogram(local, remote, predicted_center(), params_.hist);
        if (hist.empty()) {
            locked_ = false;  // re-arm the FFT search next window
            have_prev_ = have_prev2_ = false;
            return empty;
        }
        CoincidenceResult fit = fit_peak(std::move(hist), params_.min_fit_count);
        prev2_ = prev_;
        have_prev2_ = have_prev_;
        prev_ = fit.centroid;
        have_prev_ = true;
        center_ = fit.centroid;
        return fit;
    }

private:
    Duration predicted_center() const
    {
        if (have_prev_ && have_prev2_)
            return prev_ + (prev_ - prev2_);
        return center_;
    }

    const SyncParams& params_;
    bool locked_{false};
    Duration center_{};
    Duration prev_{}, prev2_{};
    bool have_prev_{false}, have_prev2_{false};
};

} // namespace

SyncSeries run_session(int n_windows, const WindowSource& source, const SyncParams& params)
{
    if (n_windows < 1)
        throw std::invalid_argument("run_session: need at least one window");
    if (!(params.window_s > 0))
        throw std::invalid_argument("run_session: window length must be > 0");

    SyncSeries series;
    series.window_s = params.window_s;
    series.rows.reserve(static_cast<std::size_t>(n_windows));

    DirectionTracker fwd(params);
    DirectionTracker bwd(params);

    for (int w = 0; w < n_windows; ++w) {
        const WindowStreams streams = source(w);
        SyncRow row;
        row.window_index = w;
        row.elapsed_s = (static_cast<double>(w) + 0.5) * params.window_s;

        const CoincidenceResult rf = fwd.process(streams.local_fwd, streams.remote_fwd);
        const CoincidenceResult rb = bwd.process(streams.local_bwd, streams.remote_bwd);
        if (!rf.empty() && !rb.empty()) {
            row.t0 = extract_time_offset(rf, rb);
            row.sigma_fwd_fs = rf.sigma_fs;
            row.sigma_bwd_fs = rb.sigma_fs;
            row.n_fwd = rf.count;
            row.n_bwd = rb.count;
            row.valid = true;
        } else {
            ++series.gap_count;
        }
        series.rows.push_back(row);
    }
    return series;
}

SyncSeries run_session(const std::vector<TimeTag>& d1, const std::vector<TimeTag>& d2,
                       const std::vector<TimeTag>& d3, const std::vector<TimeTag>& d4,
                       const SyncParams& params)
{
    if (d1.empty() || d4.empty())
        throw std::invalid_argument("run_session: empty local stream");

    const TimeTag start = std::min(d1.front(), d4.front());
    const TimeTag end = std::max(d1.back(), d4.back());
    const double span = elapsed_seconds(end, start);
    const int n_windows = std::max(1, static_cast<int>(span / params.window_s) + 1);

    // Remote streams keep a search-range pad on both sides of the window so
    // partners delayed by the link are not cut at the boundary.
    const Duration pad = params.coarse.search_range;
    auto slice = [](const std::vector<TimeTag>& v, TimeTag lo, TimeTag hi) {
        auto first = std::lower_bound(v.begin(), v.end(), lo);
        auto last = std::lower_bound(v.begin(), v.end(), hi);
        return std::vector<TimeTag>(first, last);
    };

    WindowSource source = [&](int w) {
        const Duration w_lo = Duration::from_fs_double(w * params.window_s * 1e15);
        const Duration w_hi = Duration::from_fs_double((w + 1) * params.window_s * 1e15);
        const TimeTag lo = tag_add(start, w_lo);
        const TimeTag hi = tag_add(start, w_hi);
        WindowStreams s;
        s.local_fwd = slice(d1, lo, hi);
        s.remote_fwd = slice(d2, tag_add(lo, -pad), tag_add(hi, pad));
        s.local_bwd = slice(d4, lo, hi);
        s.remote_bwd = slice(d3, tag_add(lo, -pad), tag_add(hi, pad));
        return s;
    };
    return run_session(n_windows, source, params);
}

} // namespace qtwtt
