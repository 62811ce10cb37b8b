#include "qtwtt/coincidence.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace qtwtt {

namespace {

// FFTW plan creation is not thread-safe; executions on distinct plans are.
std::mutex g_fftw_mutex;

struct FftwBuffers {
    std::size_t n;
    double* a;
    double* b;
    fftw_complex* fa;
    fftw_complex* fb;
    fftw_plan fwd_a;
    fftw_plan fwd_b;
    fftw_plan inv;

    explicit FftwBuffers(std::size_t size) : n(size)
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        a = fftw_alloc_real(n);
        b = fftw_alloc_real(n);
        fa = fftw_alloc_complex(n / 2 + 1);
        fb = fftw_alloc_complex(n / 2 + 1);
        fwd_a = fftw_plan_dft_r2c_1d(static_cast<int>(n), a, fa, FFTW_ESTIMATE);
        fwd_b = fftw_plan_dft_r2c_1d(static_cast<int>(n), b, fb, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), fb, b, FFTW_ESTIMATE);
    }

    ~FftwBuffers()
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(fwd_a);
        fftw_destroy_plan(fwd_b);
        fftw_destroy_plan(inv);
        fftw_free(a);
        fftw_free(b);
        fftw_free(fa);
        fftw_free(fb);
    }

    FftwBuffers(const FftwBuffers&) = delete;
    FftwBuffers& operator=(const FftwBuffers&) = delete;
};

std::size_t next_pow2(std::size_t v)
{
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

// Fold a tag onto [0, period) femtoseconds from the zero epoch.
std::int64_t fold_fs(TimeTag t, int128 period_fs)
{
    int128 v = tag_sub(t, kEpoch).fs % period_fs;
    if (v < 0) v += period_fs;
    return static_cast<std::int64_t>(v);
}

} // namespace

std::optional<CoarseResult> coarse_offset(const std::vector<TimeTag>& a,
                                          const std::vector<TimeTag>& b,
                                          const CoarseParams& params)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("coarse_offset: empty stream");
    if (params.bin_width_fs < 1)
        throw std::invalid_argument("coarse_offset: bin width must be >= 1 fs");
    if (params.search_range.fs <= 0)
        throw std::invalid_argument("coarse_offset: search range must be > 0");

    const std::size_t min_bins =
        static_cast<std::size_t>(2 * params.search_range.fs / params.bin_width_fs) + 4;
    const std::size_t m = next_pow2(min_bins);
    const int128 period = static_cast<int128>(m) * params.bin_width_fs;

    FftwBuffers buf(m);
    std::fill(buf.a, buf.a + m, 0.0);
    std::fill(buf.b, buf.b + m, 0.0);
    for (const TimeTag& t : a)
        buf.a[static_cast<std::size_t>(fold_fs(t, period) / params.bin_width_fs)] += 1.0;
    for (const TimeTag& t : b)
        buf.b[static_cast<std::size_t>(fold_fs(t, period) / params.bin_width_fs)] += 1.0;

    fftw_execute(buf.fwd_a);
    fftw_execute(buf.fwd_b);
    // conj(FFT(a)) * FFT(b) -> circular cross-correlation c[l] = sum a[k] b[k+l]
    for (std::size_t k = 0; k <= m / 2; ++k) {
        const std::complex<double> va(buf.fa[k][0], buf.fa[k][1]);
        const std::complex<double> vb(buf.fb[k][0], buf.fb[k][1]);
        const std::complex<double> prod = std::conj(va) * vb;
        buf.fb[k][0] = prod.real();
        buf.fb[k][1] = prod.imag();
    }
    fftw_execute(buf.inv);
    const double scale = 1.0 / static_cast<double>(m);

    std::size_t peak_idx = 0;
    double peak = buf.b[0];
    for (std::size_t k = 1; k < m; ++k) {
        if (buf.b[k] > peak) {
            peak = buf.b[k];
            peak_idx = k;
        }
    }

    // Background statistics excluding the peak neighbourhood.
    double sum = 0.0, sum2 = 0.0;
    std::size_t n_bg = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t d = k > peak_idx ? k - peak_idx : peak_idx - k;
        const std::size_t wrapped = std::min(d, m - d);
        if (wrapped <= 3) continue;
        const double v = buf.b[k] * scale;
        sum += v;
        sum2 += v * v;
        ++n_bg;
    }
    if (n_bg < 16)
        throw std::invalid_argument("coarse_offset: search range too small");
    const double mean = sum / static_cast<double>(n_bg);
    const double var = std::max(sum2 / static_cast<double>(n_bg) - mean * mean, 0.0);
    const double sd = std::sqrt(var);
    const double significance = (peak * scale - mean) / std::max(sd, 1e-9);
    if (significance < params.significance_threshold)
        return std::nullopt;

    const std::int64_t signed_idx =
        peak_idx <= m / 2 ? static_cast<std::int64_t>(peak_idx)
                          : static_cast<std::int64_t>(peak_idx) - static_cast<std::int64_t>(m);
    return CoarseResult{Duration::from_fs(static_cast<int128>(signed_idx) * params.bin_width_fs),
                        significance};
}

CoincidenceResult coincidence_histogram(const std::vector<TimeTag>& a,
                                        const std::vector<TimeTag>& b,
                                        Duration coarse, const HistogramParams& params)
{
    if (params.bin_fs < 1)
        throw std::invalid_argument("coincidence_histogram: bin must be >= 1 fs");
    if (params.half_window.fs < params.bin_fs)
        throw std::invalid_argument("coincidence_histogram: half_window below one bin");

    CoincidenceResult res;
    res.bin_width_fs = params.bin_fs;
    const std::int64_t n_bins =
        static_cast<std::int64_t>(2 * params.half_window.fs / params.bin_fs) + 1;
    res.bin_counts.assign(static_cast<std::size_t>(n_bins), 0);
    res.bin_start = coarse - params.half_window;
    if (!a.empty()) {
        res.window_start = a.front();
        res.window_end = a.back();
    }

    const Duration lo_rel = -params.half_window;
    const Duration hi_rel = params.half_window;

    std::vector<bool> used(b.size(), false);
    std::size_t frontier = 0;  // first b index that can still be in range

    int128 sum = 0;
    double sum_sq_fs = 0.0;  // accumulated (diff - coarse)^2, exact enough in double
    std::int64_t count = 0;

    for (const TimeTag& ta : a) {
        const TimeTag lo_tag = tag_add(ta, coarse + lo_rel);
        while (frontier < b.size() && (b[frontier] < lo_tag || used[frontier]))
            ++frontier;
        // Scan candidates in range; nearest |diff - coarse| wins, earliest on tie.
        std::size_t best = b.size();
        int128 best_dist = 0;
        for (std::size_t j = frontier; j < b.size(); ++j) {
            if (used[j]) continue;
            const Duration rel = tag_sub(b[j], ta) - coarse;
            if (rel > hi_rel) break;
            if (rel < lo_rel) continue;
            const int128 dist = rel.fs < 0 ? -rel.fs : rel.fs;
            if (best == b.size() || dist < best_dist) {
                best = j;
                best_dist = dist;
            } else if (rel.fs >= 0 && dist > best_dist) {
                break;  // distances only grow from here
            }
        }
        if (best == b.size()) continue;
        used[best] = true;
        const Duration rel = tag_sub(b[best], ta) - coarse;
        const std::int64_t bin =
            static_cast<std::int64_t>((rel + params.half_window).fs / params.bin_fs);
        res.bin_counts[static_cast<std::size_t>(std::min(bin, n_bins - 1))] += 1;
        sum += rel.fs;
        const double rel_fs = static_cast<double>(rel.fs);
        sum_sq_fs += rel_fs * rel_fs;
        ++count;
    }

    res.count = count;
    if (count > 0) {
        // Round-half-away integer mean of the matched differences.
        const int128 c = count;
        int128 q = sum / c;
        int128 r = sum % c;
        if (r < 0) { r = -r; }
        if (2 * r >= c) q += (sum >= 0 ? 1 : -1);
        res.centroid = coarse + Duration(q);
        const double mean_fs = static_cast<double>(sum) / static_cast<double>(count);
        const double var = count > 1
            ? std::max((sum_sq_fs - mean_fs * mean_fs * static_cast<double>(count)) /
                           static_cast<double>(count - 1), 0.0)
            : 0.0;
        res.sigma_fs = std::sqrt(var);
        res.centroid_uncertainty_fs = res.sigma_fs / std::sqrt(static_cast<double>(count));
    }
    return res;
}

namespace {

struct GaussFitParams {
    double amp;
    double mu;
    double sigma;
    double bg;
};

bool solve4(double m[4][5])
{
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < 1e-300) return false;
        if (piv != col)
            for (int c = 0; c < 5; ++c) std::swap(m[piv][c], m[col][c]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
        }
    }
    return true;
}

double chisq(const std::vector<double>& x, const std::vector<double>& y,
             const std::vector<double>& w, const GaussFitParams& p)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double z = (x[i] - p.mu) / p.sigma;
        const double f = p.amp * std::exp(-0.5 * z * z) + p.bg;
        s += w[i] * (y[i] - f) * (y[i] - f);
    }
    return s;
}

// Levenberg-Marquardt for amp * exp(-(x-mu)^2 / 2 sigma^2) + bg.
bool lm_gauss_fit(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& w, GaussFitParams& p,
                  double sigma_lo, double sigma_hi)
{
    double lambda = 1e-3;
    double cur = chisq(x, y, w, p);
    bool improved_any = false;
    for (int iter = 0; iter < 200; ++iter) {
        double jtj[4][4] = {};
        double jtr[4] = {};
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double z = (x[i] - p.mu) / p.sigma;
            const double e = std::exp(-0.5 * z * z);
            const double f = p.amp * e + p.bg;
            const double r = y[i] - f;
            const double j[4] = {e, p.amp * e * z / p.sigma,
                                 p.amp * e * z * z / p.sigma, 1.0};
            for (int u = 0; u < 4; ++u) {
                jtr[u] += w[i] * j[u] * r;
                for (int v = 0; v < 4; ++v) jtj[u][v] += w[i] * j[u] * j[v];
            }
        }
        double m[4][5];
        for (int u = 0; u < 4; ++u) {
            for (int v = 0; v < 4; ++v) m[u][v] = jtj[u][v];
            m[u][u] *= 1.0 + lambda;
            m[u][4] = jtr[u];
        }
        if (!solve4(m)) return false;
        GaussFitParams trial = p;
        trial.amp += m[0][4] / m[0][0];
        trial.mu += m[1][4] / m[1][1];
        trial.sigma += m[2][4] / m[2][2];
        trial.bg += m[3][4] / m[3][3];
        if (!std::isfinite(trial.amp) || !std::isfinite(trial.mu) ||
            !std::isfinite(trial.sigma) || !std::isfinite(trial.bg))
            return false;
        trial.sigma = std::clamp(trial.sigma, sigma_lo, sigma_hi);
        trial.bg = std::max(trial.bg, 0.0);
        const double next = chisq(x, y, w, trial);
        if (next < cur) {
            const double rel = (cur - next) / std::max(cur, 1e-30);
            p = trial;
            cur = next;
            lambda = std::max(lambda * 0.3, 1e-12);
            improved_any = true;
            if (rel < 1e-12) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return improved_any || cur == 0.0;
}

} // namespace

CoincidenceResult fit_peak(CoincidenceResult h, int min_fit_count)
{
    if (h.empty())
        throw std::invalid_argument("fit_peak: empty histogram");
    h.fitted = false;
    h.fit_fallback = true;
    h.centroid_uncertainty_fs =
        h.sigma_fs / std::sqrt(static_cast<double>(std::max<std::int64_t>(h.count, 1)));
    if (h.count < min_fit_count)
        return h;

    const std::size_t n = h.bin_counts.size();
    std::vector<double> x(n), y(n), w(n);
    double ymax = 0, ymin = 1e300;
    std::int64_t nonzero = 0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<double>((h.bin_start - h.centroid).fs) +
               (static_cast<double>(i) + 0.5) * static_cast<double>(h.bin_width_fs);
        y[i] = static_cast<double>(h.bin_counts[i]);
        w[i] = 1.0 / std::max(y[i], 1.0);
        ymax = std::max(ymax, y[i]);
        ymin = std::min(ymin, y[i]);
        if (h.bin_counts[i] > 0) ++nonzero;
    }
    if (nonzero < 3) {
        // Degenerate spike: the raw moments already say everything a fit could.
        return h;
    }

    GaussFitParams p;
    p.bg = ymin;
    p.amp = std::max(ymax - ymin, 1.0);
    p.mu = 0.0;  // x is centred on the moment centroid
    p.sigma = std::max(h.sigma_fs, 0.5 * static_cast<double>(h.bin_width_fs));
    const double sigma_lo = 0.25 * static_cast<double>(h.bin_width_fs);
    const double sigma_hi = 2.0 * std::abs(x.back() - x.front());

    if (!lm_gauss_fit(x, y, w, p, sigma_lo, sigma_hi))
        return h;
    if (p.amp <= 0 || p.sigma <= sigma_lo * 1.001 || p.sigma >= sigma_hi * 0.999)
        return h;
    // A peak indistinguishable from background noise is a non-fit.
    if (p.amp < 5.0 * std::sqrt(std::max(p.bg, 1.0)))
        return h;

    h.fitted = true;
    h.fit_fallback = false;
    h.centroid = h.centroid + Duration::from_fs_double(p.mu);
    h.sigma_fs = p.sigma;
    h.background_per_bin = p.bg;
    h.centroid_uncertainty_fs = p.sigma / std::sqrt(static_cast<double>(h.count));
    return h;
}

Duration extract_time_offset(const CoincidenceResult& fwd, const CoincidenceResult& bwd)
{
    if (fwd.empty() || bwd.empty())
        throw std::invalid_argument("extract_time_offset: empty coincidence result");
    return (fwd.centroid - bwd.centroid).half_round_even();
}

double precision_estimate(double sigma_fs, std::int64_t n)
{
    if (n < 1)
        throw std::invalid_argument("precision_estimate: n must be >= 1");
    if (!(sigma_fs > 0))
        throw std::invalid_argument("precision_estimate: sigma must be > 0");
    return sigma_fs / std::sqrt(static_cast<double>(n));
}

} // namespace qtwtt
