#pragma once

#include <numbers>

// Unit conventions used throughout:
//   - configuration frequencies are linear frequencies f in MHz (f = omega/2pi)
//   - internal angular frequencies are rad/ns, omega = 2pi * f * 1e-3
//   - time is in ns, decay rates are plain inverse-time rates in 1/ns
namespace tc::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Decay/dephasing rates quoted in MHz are treated as plain rates
// (Gamma1 = 2 MHz -> T1 = 500 ns).  Flip to kTwoPi if the device
// convention turns out to be angular.
inline constexpr double kRateAngularFactor = 1.0;

// The sigma_z dissipator carries Gamma2/2 so that the qubit coherence
// decays as exp(-Gamma2 t) from pure dephasing alone.
inline constexpr double kDephasingHalf = 0.5;

constexpr double angular_from_mhz(double f_mhz) { return kTwoPi * f_mhz * 1e-3; }

constexpr double mhz_from_angular(double w_rad_ns) { return w_rad_ns / (kTwoPi * 1e-3); }

constexpr double rate_from_mhz(double r_mhz) { return kRateAngularFactor * r_mhz * 1e-3; }

}  // namespace tc::units
