#pragma once

#include <functional>
#include <vector>

#include "gridformer/state_space.hpp"

namespace gridformer {

/// Strictly increasing angular frequencies (rad/s), all positive and
/// finite. Discretizes the continuous sweeps used by every metric.
class FrequencyGrid {
public:
    /// Placeholder single-point grid at 1 rad/s.
    FrequencyGrid() : omega_{1.0} {}
    explicit FrequencyGrid(std::vector<double> omega);

    /// Logarithmically spaced grid between two frequencies in Hz.
    static FrequencyGrid log_space(double f_min_hz, double f_max_hz, int points);

    /// The default sweep: 500 points, 0.05 Hz to 2 kHz.
    static FrequencyGrid default_sweep();

    /// Same span, `factor` times as many points.
    FrequencyGrid refined(int factor) const;

    std::size_t size() const { return omega_.size(); }
    double operator[](std::size_t i) const { return omega_[i]; }
    const std::vector<double>& omegas() const { return omega_; }
    double min_omega() const { return omega_.front(); }
    double max_omega() const { return omega_.back(); }

private:
    std::vector<double> omega_;
};

struct FreqResponseSample {
    double omega = 0.0;
    Eigen::MatrixXcd value;
};

/// Transfer matrix sampled at every grid point (parallel over points).
std::vector<FreqResponseSample> frequency_response(const StateSpaceModel& model,
                                                   const FrequencyGrid& grid);

/// Maximum of `f` over [lo, hi] by golden-section search on log(omega).
/// Assumes a locally unimodal peak, which holds for the bracketed argmax
/// of a sampled frequency sweep.
struct PeakEstimate {
    double omega = 0.0;
    double value = 0.0;
};
PeakEstimate refine_peak(const std::function<double(double)>& f,
                         double omega_lo, double omega_hi);

/// Largest sigma_max over the grid with golden-section refinement around
/// the discrete argmax. Throws UnstableModel for unstable models.
struct HinfResult {
    double value = 0.0;
    double peak_omega = 0.0;
};
HinfResult hinf_norm(const StateSpaceModel& model, const FrequencyGrid& grid);

} // namespace gridformer
