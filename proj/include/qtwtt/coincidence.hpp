#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qtwtt/timebase.hpp"

namespace qtwtt {

struct CoarseParams {
    std::int64_t bin_width_fs{1'000'000};           ///< 1 ns
    Duration search_range{Duration::from_us(50)};   ///< covers link delay + offsets
    double significance_threshold{6.0};             ///< peak > mean + 6 SD of background
};

struct CoarseResult {
    Duration lag;         ///< (t_b - t_a) at the correlation maximum, +- bin/2
    double significance;  ///< (peak - background mean) / background SD
};

/// Coarse lag search between two tag streams: both streams are folded modulo
/// the search period, binned, and circularly cross-correlated via FFT. The
/// fold keeps the transform small while preserving the pair peak; the lag is
/// unfolded into [-range, +range]. Returns nullopt when no bin clears the
/// significance threshold (uncorrelated streams).
std::optional<CoarseResult> coarse_offset(const std::vector<TimeTag>& a,
                                          const std::vector<TimeTag>& b,
                                          const CoarseParams& params);

struct HistogramParams {
    Duration half_window{Duration::from_ns(2)};
    std::int64_t bin_fs{10'000};  ///< 10 ps
};

/// Matched-difference histogram around a coarse lag, plus the raw moments of
/// the matched differences. centroid/sigma start as those moments; fit_peak
/// replaces them with the fitted values when the fit converges.
struct CoincidenceResult {
    Duration centroid{};
    double sigma_fs{0};
    std::int64_t count{0};
    double centroid_uncertainty_fs{0};

    std::vector<std::int64_t> bin_counts;
    Duration bin_start{};          ///< left edge of bin 0 in the (b - a) frame
    std::int64_t bin_width_fs{0};

    TimeTag window_start{};
    TimeTag window_end{};

    bool fitted{false};        ///< fit_peak converged
    bool fit_fallback{false};  ///< fit_peak ran but fell back to the moments
    double background_per_bin{0};

    bool empty() const { return count == 0; }
};

/// Greedy one-to-one nearest matching: each tag of `a` claims the unused tag
/// of `b` closest to (a + coarse) inside [coarse - half_window,
/// coarse + half_window]; each b tag is used at most once.
CoincidenceResult coincidence_histogram(const std::vector<TimeTag>& a,
                                        const std::vector<TimeTag>& b,
                                        Duration coarse, const HistogramParams& params);

/// Weighted least-squares Gaussian + constant background fit of the
/// histogram. On divergence (no convergence, degenerate peak, or too few
/// counts) the moments are kept and fit_fallback is set. The centroid
/// uncertainty estimate sigma/sqrt(count) is attached either way.
CoincidenceResult fit_peak(CoincidenceResult h, int min_fit_count = 50);

/// Two-way offset: (centroid_fwd - centroid_bwd) / 2 with exact femtosecond
/// halving (round-to-even on odd differences).
Duration extract_time_offset(const CoincidenceResult& fwd, const CoincidenceResult& bwd);

/// Single-shot precision estimator: sigma / sqrt(n).
double precision_estimate(double sigma_fs, std::int64_t n);

} // namespace qtwtt
