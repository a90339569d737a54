#include "gridformer/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridformer/parallel.hpp"
#include "gridformer/svd.hpp"

namespace gridformer {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

FrequencyGrid::FrequencyGrid(std::vector<double> omega) : omega_(std::move(omega)) {
    if (omega_.empty())
        throw DimensionMismatch("frequency grid must be nonempty");
    double prev = 0.0;
    for (double w : omega_) {
        if (!(w > prev) || !std::isfinite(w))
            throw DimensionMismatch("frequency grid must be strictly increasing and positive");
        prev = w;
    }
}

FrequencyGrid FrequencyGrid::log_space(double f_min_hz, double f_max_hz, int points) {
    if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz) || points < 2)
        throw DimensionMismatch("log_space needs 0 < f_min < f_max and points >= 2");
    std::vector<double> omega(static_cast<std::size_t>(points));
    const double lo = std::log(f_min_hz * kTwoPi);
    const double hi = std::log(f_max_hz * kTwoPi);
    for (int i = 0; i < points; ++i)
        omega[static_cast<std::size_t>(i)] =
            std::exp(lo + (hi - lo) * static_cast<double>(i) / (points - 1));
    return FrequencyGrid(std::move(omega));
}

FrequencyGrid FrequencyGrid::default_sweep() {
    return log_space(0.05, 2000.0, 500);
}

FrequencyGrid FrequencyGrid::refined(int factor) const {
    const int points = static_cast<int>(size()) * factor;
    return log_space(min_omega() / kTwoPi, max_omega() / kTwoPi, points);
}

std::vector<FreqResponseSample> frequency_response(const StateSpaceModel& model,
                                                   const FrequencyGrid& grid) {
    std::vector<FreqResponseSample> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        out[i].omega = grid[i];
        out[i].value = eval_at(model, std::complex<double>(0.0, grid[i]));
    });
    return out;
}

PeakEstimate refine_peak(const std::function<double(double)>& f,
                         double omega_lo, double omega_hi) {
    const double phi = 0.61803398874989484820;
    double a = std::log(omega_lo), b = std::log(omega_hi);
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
    for (int it = 0; it < 60 && (b - a) > 1e-10; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(std::exp(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(std::exp(x1));
        }
    }
    PeakEstimate best;
    best.omega = std::exp(f1 > f2 ? x1 : x2);
    best.value = std::max(f1, f2);
    return best;
}

HinfResult hinf_norm(const StateSpaceModel& model, const FrequencyGrid& grid) {
    if (!is_stable(model))
        throw UnstableModel("hinf_norm requires a stable model");

    std::vector<double> gains(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        gains[i] = sigma_max(eval_at(model, std::complex<double>(0.0, grid[i])));
    });
    const std::size_t k = static_cast<std::size_t>(
        std::max_element(gains.begin(), gains.end()) - gains.begin());

    const double lo = grid[k > 0 ? k - 1 : k];
    const double hi = grid[k + 1 < grid.size() ? k + 1 : k];
    HinfResult result;
    result.value = gains[k];
    result.peak_omega = grid[k];
    if (hi > lo) {
        PeakEstimate refined = refine_peak(
            [&](double w) {
                return sigma_max(eval_at(model, std::complex<double>(0.0, w)));
            },
            lo, hi);
        if (refined.value > result.value) {
            result.value = refined.value;
            result.peak_omega = refined.omega;
        }
    }
    return result;
}

} // namespace gridformer
