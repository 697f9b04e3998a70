#include "torusflow/stats.hpp"

#include <cmath>
#include <cstddef>

#include "torusflow/errors.hpp"

namespace torusflow {

MeanVar mean_var(const std::vector<double>& xs) {
    if (xs.size() < 2) throw validation_error("mean_var: need at least 2 samples");
    double m = 0.0;
    for (double x : xs) m += x;
    m /= xs.size();
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= (xs.size() - 1);
    return {m, v};
}

double autocorr_at(const std::vector<double>& xs, int lag) {
    const auto n = static_cast<std::ptrdiff_t>(xs.size());
    if (lag < 0 || lag >= n) throw validation_error("autocorr_at: lag out of range");
    double m = 0.0;
    for (double x : xs) m += x;
    m /= n;
    double c0 = 0.0, cl = 0.0;
    for (std::ptrdiff_t i = 0; i < n; ++i) c0 += (xs[i] - m) * (xs[i] - m);
    for (std::ptrdiff_t i = 0; i + lag < n; ++i) cl += (xs[i] - m) * (xs[i + lag] - m);
    if (c0 == 0.0) return (lag == 0) ? 1.0 : 0.0;
    return cl / c0;
}

double integrated_autocorr_time(const std::vector<double>& xs) {
    if (xs.size() < 8) return 1.0;
    const int max_lag = static_cast<int>(xs.size() / 2);
    double m = 0.0;
    for (double x : xs) m += x;
    m /= xs.size();
    double c0 = 0.0;
    for (double x : xs) c0 += (x - m) * (x - m);
    if (c0 == 0.0) return 1.0;
    double tau = 1.0;
    for (int l = 1; l <= max_lag; ++l) {
        double cl = 0.0;
        for (size_t i = 0; i + l < xs.size(); ++i) cl += (xs[i] - m) * (xs[i + l] - m);
        tau += 2.0 * cl / c0;
        if (l > 5.0 * tau) break;  // Sokal window
    }
    return std::max(tau, 1.0);
}

double efolding_autocorr_lag(const std::vector<double>& xs) {
    const double target = std::exp(-1.0);
    double prev = 1.0;
    const int max_lag = static_cast<int>(xs.size() / 2);
    for (int l = 1; l <= max_lag; ++l) {
        const double r = autocorr_at(xs, l);
        if (r < target) {
            // linear interpolation between (l-1, prev) and (l, r)
            const double f = (prev - target) / (prev - r);
            return (l - 1) + f;
        }
        prev = r;
    }
    return max_lag;  // never decorrelated inside the window
}

double vector_efolding_autocorr_lag(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 8)
        throw validation_error("vector_efolding_autocorr_lag: need at least 8 samples");
    const size_t n = rows.size(), d = rows.front().size();
    std::vector<double> mean(d, 0.0);
    for (const auto& r : rows)
        for (size_t i = 0; i < d; ++i) mean[i] += r[i];
    for (double& m : mean) m /= n;
    auto cov_at = [&](size_t lag) {
        double c = 0.0;
        for (size_t t = 0; t + lag < n; ++t)
            for (size_t i = 0; i < d; ++i)
                c += (rows[t][i] - mean[i]) * (rows[t + lag][i] - mean[i]);
        return c / (n - lag);
    };
    const double c0 = cov_at(0);
    if (c0 == 0.0) return 1.0;
    const double target = std::exp(-1.0);
    double prev = 1.0;
    const size_t max_lag = n / 2;
    for (size_t l = 1; l <= max_lag; ++l) {
        const double r = cov_at(l) / c0;
        if (r < target) {
            const double f = (prev - target) / (prev - r);
            return (l - 1) + f;
        }
        prev = r;
    }
    return static_cast<double>(max_lag);
}

BatchCI batch_means_ci(const std::vector<double>& xs, int batches, double t_quantile) {
    if (batches < 2) throw validation_error("batch_means_ci: need at least 2 batches");
    if (xs.size() < static_cast<size_t>(2 * batches))
        throw validation_error("batch_means_ci: series too short for requested batches");
    const size_t per = xs.size() / batches;
    std::vector<double> means(batches, 0.0);
    for (int b = 0; b < batches; ++b) {
        double s = 0.0;
        for (size_t i = b * per; i < (b + 1) * per; ++i) s += xs[i];
        means[b] = s / per;
    }
    const MeanVar mv = mean_var(means);
    return {mv.mean, t_quantile * std::sqrt(mv.var / batches), batches};
}

} // namespace torusflow
