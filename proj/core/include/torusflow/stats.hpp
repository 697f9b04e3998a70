#pragma once

// Small statistics helpers: moments, autocorrelation times, batch-means
// confidence intervals.  Everything operates on plain series; units are
// sample counts unless stated otherwise.

#include <vector>

namespace torusflow {

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;  // unbiased sample variance
};
MeanVar mean_var(const std::vector<double>& xs);

// Normalized autocorrelation rho(lag) of a scalar series.
double autocorr_at(const std::vector<double>& xs, int lag);

// Integrated autocorrelation time tau = 1 + 2 sum_{l>=1} rho(l), with the
// usual self-consistent truncation (stop summing once l > 5 tau).  Returns
// values in sample units; ~1 for white noise.
double integrated_autocorr_time(const std::vector<double>& xs);

// First lag at which rho drops below 1/e (linear interpolation between the
// bracketing lags).  Sample units.
double efolding_autocorr_lag(const std::vector<double>& xs);

// e-folding lag of the summed autocovariance of a vector-valued series
// (rows = samples).  Used for the velocity-field decorrelation estimate:
// rho(l) = sum_i cov(X_i(t), X_i(t+l)) / sum_i var(X_i).
double vector_efolding_autocorr_lag(const std::vector<std::vector<double>>& rows);

struct BatchCI {
    double mean = 0.0;
    double half_width = 0.0;  // half-width of the confidence interval
    int batches = 0;
};

// Batch-means CI: split the series into `batches` equal blocks, take block
// means, and use their spread.  t_quantile defaults to the two-sided 95%
// Student-t value for 19 dof (20 batches).
BatchCI batch_means_ci(const std::vector<double>& xs, int batches = 20,
                       double t_quantile = 2.093);

} // namespace torusflow
