#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gridformer/frequency.hpp"
#include "gridformer/line.hpp"
#include "gridformer/operating_point.hpp"
#include "gridformer/state_space.hpp"

namespace gridformer {

enum class CurveKind { FI, IN, FS, Kappa, Alpha, Bus, Passivity };

std::string to_string(CurveKind kind);

/// Frequency-indexed metric values with refined-peak metadata.
struct StrengthCurve {
    FrequencyGrid grid{};
    std::vector<double> values{};
    CurveKind kind = CurveKind::FI;
    double peak_omega = 0.0;
    double peak_value = 0.0;
    double dc = 0.0; ///< value at the lowest grid point

    double min_value() const;
    double max_value() const;
};

/// Builds a curve from sampled values plus a continuous evaluator used to
/// refine the peak around the discrete argmax.
StrengthCurve make_curve(CurveKind kind, const FrequencyGrid& grid,
                         std::vector<double> values,
                         const std::function<double(double)>& eval);

/// Sensitivity S_v(s) = [I + L_g gamma^{-1}(s) Y_de(s)]^{-1} from grid
/// voltage to terminal voltage, realized from the physical feedback loop
/// (series line current balance) without forming gamma^{-1}. Supports
/// strictly proper devices (the converter architectures) and devices with
/// invertible feedthrough (static test gains); anything else is an
/// ill-posed node. The realization's A matrix carries exactly the
/// closed-loop modes, so is_stable on the result decides loop stability.
StateSpaceModel sensitivity(const StateSpaceModel& Y_de, const LineParams& line);

/// Forming Index FI(jw) = sigma_max[S_v(jw)] over the grid.
StrengthCurve forming_index(const StateSpaceModel& S_v, const FrequencyGrid& grid);

struct GfmVerdict {
    bool gfm = false;
    double margin = 0.0; ///< min |1 - FI| over the band
    std::vector<double> violation_omegas;
};

/// GFM iff FI < 1 strictly at every grid point inside [f_lo, f_hi] Hz.
/// FI = 1 exactly classifies GFL. Throws BandOutsideGrid when the band
/// does not lie within the curve's grid.
GfmVerdict classify_gfm(const StrengthCurve& curve, double f_lo_hz = 5.0,
                        double f_hi_hz = 200.0);

/// Impedance norm sigma_max[Y_de(jw)^{-1}]. Throws SingularAdmittance when
/// the admittance is numerically singular at a grid point.
StrengthCurve impedance_norm(const StateSpaceModel& Y_de, const FrequencyGrid& grid);

/// Frequency-smoothing metric: magnitude of the bottom-right entry of
/// U^{-1} e^{J theta_u} S_v(jw); bounded by FI(jw)/U pointwise.
StrengthCurve frequency_smoothing(const StateSpaceModel& S_v, const OperatingPoint& op,
                                  const FrequencyGrid& grid);

/// CSV with header omega_rad_s,f_hz,value.
void write_curve_csv(std::ostream& os, const StrengthCurve& curve);

} // namespace gridformer
