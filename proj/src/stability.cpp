#include "qtwtt/stability.hpp"

#include <cmath>

namespace qtwtt {

double overlapping_adev(std::span<const double> phase_s, double tau0_s, int m)
{
    const std::size_t n = phase_s.size();
    if (m < 1 || tau0_s <= 0)
        throw std::invalid_argument("overlapping_adev: need m >= 1 and tau0 > 0");
    if (n < 2 * static_cast<std::size_t>(m) + 1)
        throw std::invalid_argument("overlapping_adev: series too short for 2m");
    const std::size_t terms = n - 2 * static_cast<std::size_t>(m);
    double sum = 0.0;
    for (std::size_t i = 0; i < terms; ++i) {
        const double v = phase_s[i + 2 * m] - 2.0 * phase_s[i + m] + phase_s[i];
        sum += v * v;
    }
    const double tau = m * tau0_s;
    return std::sqrt(sum / (2.0 * static_cast<double>(terms) * tau * tau));
}

double modified_adev(std::span<const double> phase_s, double tau0_s, int m)
{
    const std::size_t n = phase_s.size();
    if (m < 1 || tau0_s <= 0)
        throw std::invalid_argument("modified_adev: need m >= 1 and tau0 > 0");
    if (n < 3 * static_cast<std::size_t>(m))
        throw std::invalid_argument("modified_adev: series too short for 3m");
    const std::size_t outer = n - 3 * static_cast<std::size_t>(m) + 1;
    const double tau = m * tau0_s;
    // Running inner sum over m consecutive second differences.
    double inner = 0.0;
    for (int i = 0; i < m; ++i)
        inner += phase_s[i + 2 * m] - 2.0 * phase_s[i + m] + phase_s[i];
    double sum = inner * inner;
    for (std::size_t j = 1; j < outer; ++j) {
        const std::size_t i_new = j + m - 1;
        const std::size_t i_old = j - 1;
        inner += phase_s[i_new + 2 * m] - 2.0 * phase_s[i_new + m] + phase_s[i_new];
        inner -= phase_s[i_old + 2 * m] - 2.0 * phase_s[i_old + m] + phase_s[i_old];
        sum += inner * inner;
    }
    const double msq = static_cast<double>(m) * static_cast<double>(m);
    return std::sqrt(sum / (2.0 * msq * tau * tau * static_cast<double>(outer)));
}

double tdev(std::span<const double> phase_s, double tau0_s, int m)
{
    const double tau = m * tau0_s;
    return tau * modified_adev(phase_s, tau0_s, m) / std::sqrt(3.0);
}

std::vector<int> default_tau_grid(std::size_t n_samples)
{
    std::vector<int> grid;
    for (std::size_t m = 1; 4 * m <= n_samples; m *= 2)
        grid.push_back(static_cast<int>(m));
    if (grid.empty() && n_samples >= 3)
        grid.push_back(1);
    return grid;
}

StabilitySeries stability_analysis(std::span<const double> phase_s, double tau0_s,
                                   const std::vector<int>& m_grid)
{
    StabilitySeries out;
    const std::size_t n = phase_s.size();
    for (int m : m_grid) {
        if (m < 1) continue;
        const std::size_t um = static_cast<std::size_t>(m);
        if (n < 2 * um + 1 + 2) continue;  // need >= 3 ADEV terms
        const std::size_t adev_terms = n - 2 * um;
        if (adev_terms < 3) continue;
        StabilityRow row;
        row.tau_s = m * tau0_s;
        row.adev = overlapping_adev(phase_s, tau0_s, m);
        row.adev_err = row.adev / std::sqrt(static_cast<double>(n) / m);
        if (n >= 3 * um + 3)
            row.tdev_fs = tdev(phase_s, tau0_s, m) * 1e15;
        else
            row.tdev_fs = 0.0;
        row.n_terms = static_cast<std::int64_t>(adev_terms);
        out.rows.push_back(row);
    }
    return out;
}

DriftFit fit_quadratic(std::span<const double> t_s, std::span<const double> x_fs)
{
    const std::size_t n = t_s.size();
    if (x_fs.size() != n)
        throw std::invalid_argument("fit_quadratic: size mismatch");
    if (n < 3)
        throw RankDeficientError("fit_quadratic: need at least 3 points");

    // Count distinct abscissae; fewer than 3 makes the normal matrix singular.
    {
        int distinct = 1;
        for (std::size_t i = 1; i < n && distinct < 3; ++i) {
            bool seen = false;
            for (std::size_t j = 0; j < i; ++j)
                if (t_s[j] == t_s[i]) { seen = true; break; }
            if (!seen) ++distinct;
        }
        if (distinct < 3)
            throw RankDeficientError("fit_quadratic: fewer than 3 distinct times");
    }

    // Center and scale t for conditioning, then map coefficients back.
    double tmin = t_s[0], tmax = t_s[0];
    for (double t : t_s) {
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    }
    const double tc = 0.5 * (tmin + tmax);
    const double ts = std::max(0.5 * (tmax - tmin), 1.0);

    double s[5] = {0, 0, 0, 0, 0};  // sums of u^k
    double b0 = 0, b1 = 0, b2 = 0;  // sums of x u^k
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (t_s[i] - tc) / ts;
        const double u2 = u * u;
        s[0] += 1;
        s[1] += u;
        s[2] += u2;
        s[3] += u2 * u;
        s[4] += u2 * u2;
        b0 += x_fs[i];
        b1 += x_fs[i] * u;
        b2 += x_fs[i] * u2;
    }
    // 3x3 symmetric solve by Gaussian elimination with partial pivoting.
    double A[3][4] = {{s[0], s[1], s[2], b0},
                      {s[1], s[2], s[3], b1},
                      {s[2], s[3], s[4], b2}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-12)
            throw RankDeficientError("fit_quadratic: singular normal matrix");
        if (piv != col)
            for (int c = 0; c < 4; ++c) std::swap(A[piv][c], A[col][c]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = A[r][col] / A[col][col];
            for (int c = col; c < 4; ++c) A[r][c] -= f * A[col][c];
        }
    }
    const double c0 = A[0][3] / A[0][0];
    const double c1 = A[1][3] / A[1][1];
    const double c2 = A[2][3] / A[2][2];

    // x = c0 + c1 u + c2 u^2 with u = (t - tc)/ts  ->  coefficients in t.
    const double q2 = c2 / (ts * ts);
    const double q1 = c1 / ts - 2.0 * q2 * tc;
    const double q0 = c0 - c1 * tc / ts + q2 * tc * tc;

    DriftFit fit;
    fit.a0_fs = q0;
    fit.a1 = q1 * 1e-15;        // fs/s -> dimensionless fractional frequency
    fit.a2_per_s = 2.0 * q2 * 1e-15;
    fit.residuals_fs.resize(n);
    double rs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (t_s[i] - tc) / ts;
        const double model = c0 + c1 * u + c2 * u * u;
        fit.residuals_fs[i] = x_fs[i] - model;
        rs += fit.residuals_fs[i] * fit.residuals_fs[i];
    }
    fit.residual_sd_fs = n > 3 ? std::sqrt(rs / static_cast<double>(n - 3)) : 0.0;
    return fit;
}

MeanSd summary_sd(std::span<const double> values)
{
    const std::size_t n = values.size();
    if (n < 2)
        throw std::invalid_argument("summary_sd: need at least 2 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

} // namespace qtwtt
