#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qtwtt/coincidence.hpp"
#include "qtwtt/timebase.hpp"

namespace qtwtt {

struct SyncParams {
    double window_s{30.0};
    CoarseParams coarse{};
    HistogramParams hist{};
    int min_fit_count{50};
};

/// One analysis window. Invalid rows mark gaps (no coarse lock, empty
/// window, or unusable fit); the session never aborts on them.
struct SyncRow {
    int window_index{0};
    double elapsed_s{0};
    Duration t0{};
    double sigma_fwd_fs{0};
    double sigma_bwd_fs{0};
    std::int64_t n_fwd{0};
    std::int64_t n_bwd{0};
    bool valid{false};
};

struct SyncSeries {
    std::vector<SyncRow> rows;
    double window_s{0};
    int gap_count{0};

    /// Longest contiguous run of valid rows (used by the stability analysis,
    /// which refuses to interpolate across gaps).
    std::pair<std::size_t, std::size_t> longest_valid_run() const;
};

/// Per-window input: the four detector tag streams, already in the local
/// clock frames. fwd matches local NTSC (D1) against remote LSO (D2); bwd
/// matches local LSO (D4) against remote NTSC (D3).
struct WindowStreams {
    std::vector<TimeTag> local_fwd;
    std::vector<TimeTag> remote_fwd;
    std::vector<TimeTag> local_bwd;
    std::vector<TimeTag> remote_bwd;
};

using WindowSource = std::function<WindowStreams(int window_index)>;

/// Run the coincidence pipeline over consecutive windows. The coarse FFT
/// search runs once per direction and is then replaced by centroid tracking
/// (linear extrapolation of the two previous fits), which follows clock
/// drift at a fraction of the half-window per window. A window that fails
/// re-arms the coarse search.
SyncSeries run_session(int n_windows, const WindowSource& source, const SyncParams& params);

/// Convenience entry for file-loaded streams: slices the four full-session
/// streams into windows by local-arm tag time.
SyncSeries run_session(const std::vector<TimeTag>& d1, const std::vector<TimeTag>& d2,
                       const std::vector<TimeTag>& d3, const std::vector<TimeTag>& d4,
                       const SyncParams& params);

} // namespace qtwtt
