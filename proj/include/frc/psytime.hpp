// Perceived ("psychological") tenor as a function of real tenor.
#pragma once

namespace frc {

enum class PsyTimeKind { Identity, LogHyperbolic, PowerLaw, RegularizedPowerLaw };

/// psi and theta must share units; callers working in quarters pass psi in
/// quarters (see psi_months_to_tenor_units).
struct PsyTimeSpec {
  PsyTimeKind kind = PsyTimeKind::Identity;
  double psi = 1.0;      // LogHyperbolic, RegularizedPowerLaw
  double psi_bar = 1.0;  // PowerLaw exponent in (0, 1]
  double zeta = 1.0;     // RegularizedPowerLaw exponent in (0, 1]

  static PsyTimeSpec identity() { return {}; }
  static PsyTimeSpec log_hyperbolic(double psi) { return {PsyTimeKind::LogHyperbolic, psi, 1.0, 1.0}; }
  static PsyTimeSpec power_law(double psi_bar) { return {PsyTimeKind::PowerLaw, 1.0, psi_bar, 1.0}; }
  static PsyTimeSpec regularized(double psi, double zeta) {
    return {PsyTimeKind::RegularizedPowerLaw, psi, 1.0, zeta};
  }
};

/// Perceived tenor z(theta). theta >= 0.
///   LogHyperbolic:        psi * log(1 + theta / psi)
///   PowerLaw:             theta^psi_bar
///   RegularizedPowerLaw:  (psi / zeta) * ((1 + theta / psi)^zeta - 1)
double perceived_time(const PsyTimeSpec& spec, double theta);

/// (1 + theta/psi)^(-r psi), identical to exp(-r z(theta)) for the
/// log-hyperbolic clock.
double hyperbolic_discount(double psi, double r, double theta);

/// Model psi is quoted in months; tenors are counted in quarters.
inline double psi_months_to_tenor_units(double psi_months) { return psi_months / 3.0; }

}  // namespace frc
