#pragma once

#include <string>
#include <variant>

#include "gridformer/operating_point.hpp"
#include "gridformer/state_space.hpp"

namespace gridformer {

enum class Architecture { PllPq, PllPv, Vsg, Droop, Voc, PllGfm, None };

std::string to_string(Architecture arch);
Architecture architecture_from_string(const std::string& name);

/// PLL-based converter with constant-power control. Outer PI loops on P
/// and Q produce local-frame current references tracked through a
/// first-order lag.
struct PllPqParams {
    double pll_bw_hz = 30.0; ///< PLL natural frequency (Hz)
    double zeta = 0.707;     ///< PLL damping
    double kp_p = 0.0;       ///< active-power PI
    double ki_p = 0.3;
    double kp_q = 0.0; ///< reactive-power PI
    double ki_q = 0.3;
    double tau_i = 1e-3; ///< current tracking lag (s)
};

/// PLL-based converter regulating terminal voltage magnitude instead of Q.
struct PllPvParams {
    double pll_bw_hz = 30.0;
    double zeta = 0.707;
    double kp_p = 0.0;
    double ki_p = 0.3;
    double kp_v = 0.0; ///< voltage-magnitude PI
    double ki_v = 0.3;
    double v_leak = 0.3; ///< integrator leak (rad/s) keeping Y_de in RH-inf
    double tau_i = 1e-3;
};

/// Virtual synchronous generator: swing law J s dw = -dP - D dw, constant
/// internal EMF magnitude behind the virtual impedance L_v gamma^{-1}(s).
/// inertia = 0 degenerates to droop control exactly.
struct VsgParams {
    double inertia = 2.0;    ///< J (pu)
    double damping = 50.0;   ///< D (pu); droop slope is 1/D
    double virtual_l = 0.15; ///< L_v (pu)
    double virtual_tau = 0.1;
};

/// Droop control, the J = 0 member of the VSG family with D = 1/K_P.
struct DroopParams {
    double damping = 50.0;
    double virtual_l = 0.15;
    double virtual_tau = 0.1;
};

/// Virtual oscillator control. Oscillator voltage behind a filter
/// impedance; phase rate eta (P_ref - P)/U0^2, first-order amplitude loop
/// with reactive droop K_Q.
struct VocParams {
    double eta = 0.02;      ///< synchronization gain
    double lambda_a = 10.0; ///< amplitude loop gain (rad/s)
    double k_q = 0.2;       ///< reactive droop (pu)
    double filter_l = 0.15;
    double filter_tau = 0.1;
};

/// PLL-synchronized grid-forming control: active-power PI shifts the EMF
/// phase inside the PLL frame, virtual admittance Y_v gamma(s) generates
/// the current reference, tracked through a first-order lag.
struct PllGfmParams {
    double virtual_y = 6.0; ///< Y_v (pu)
    double virtual_tau = 0.1;
    double pll_bw_hz = 2.0; ///< slow PLL: the EMF phase must stand still
    double zeta = 0.707;
    double kp_p = 0.02; ///< power-loop PI (phase offset)
    double ki_p = 0.5;
    double tau_i = 1e-3;
};

struct NoneParams {};

/// Control architecture tag plus its parameter record and rating.
struct DeviceSpec {
    using Params = std::variant<PllPqParams, PllPvParams, VsgParams, DroopParams,
                                VocParams, PllGfmParams, NoneParams>;

    Params params = NoneParams{};
    double capacity = 1.0; ///< S_B (pu)

    Architecture arch() const;
    void validate() const;
    /// GFM-style devices regulate voltage magnitude; PLL-PQ regulates Q.
    PowerRefMode ref_mode() const;
};

/// Second-order SRF-PLL tracking block: input dU_q(local), output
/// d(theta_pll). Gains k_p = 2 zeta w, k_i = w^2 with w = 2 pi f_pll; the
/// phase detector is normalized by U0 so the closed tracking transfer is
/// w^2 / (s^2 + 2 zeta w s + w^2), with unity DC gain.
StateSpaceModel pll_block(double pll_bw_hz, double zeta, double U0);

/// Small-signal admittance Y_de(s) of the device about an operating
/// point: 2 inputs dU_dq (global frame), 2 outputs dI_dq with current
/// positive into the converter. NONE yields the 2x2 zero gain.
StateSpaceModel build_admittance(const DeviceSpec& spec, const OperatingPoint& op,
                                 double omega0);

} // namespace gridformer
