#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qtwtt {

/// One (tau, deviation) row. adev is dimensionless, tdev is reported in
/// femtoseconds; n_terms is the number of second-difference terms that
/// entered the ADEV estimate at this tau.
struct StabilityRow {
    double tau_s{0};
    double adev{0};
    double adev_err{0};
    double tdev_fs{0};
    std::int64_t n_terms{0};
};

struct StabilitySeries {
    std::vector<StabilityRow> rows;
};

class RankDeficientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Overlapping Allan deviation of evenly spaced phase data (seconds) at
/// averaging factor m:
///   sigma_y^2(m tau0) = sum (x[i+2m] - 2 x[i+m] + x[i])^2 / (2 (n-2m) (m tau0)^2)
double overlapping_adev(std::span<const double> phase_s, double tau0_s, int m);

/// Modified Allan deviation (triple-average second-difference form).
double modified_adev(std::span<const double> phase_s, double tau0_s, int m);

/// Time deviation: tau * mod_sigma_y(tau) / sqrt(3), in seconds.
double tdev(std::span<const double> phase_s, double tau0_s, int m);

/// Octave-spaced averaging factors 1, 2, 4, ... capped at n/4.
std::vector<int> default_tau_grid(std::size_t n_samples);

/// Full ADEV + TDEV table over the given m grid. Rows with fewer than 3
/// usable second differences are omitted.
StabilitySeries stability_analysis(std::span<const double> phase_s, double tau0_s,
                                   const std::vector<int>& m_grid);

/// Quadratic drift fit of a time-offset series:
///   x(t) = a0 + a1 t + (a2/2) t^2
/// with x in femtoseconds and t in seconds. a1 is dimensionless fractional
/// frequency, a2 the fractional frequency drift per second.
struct DriftFit {
    double a0_fs{0};
    double a1{0};
    double a2_per_s{0};
    std::vector<double> residuals_fs;
    double residual_sd_fs{0};
};

DriftFit fit_quadratic(std::span<const double> t_s, std::span<const double> x_fs);

/// Sample mean and unbiased standard deviation; requires n >= 2.
struct MeanSd {
    double mean{0};
    double sd{0};
};
MeanSd summary_sd(std::span<const double> values);

} // namespace qtwtt
