#include "frc/psytime.hpp"

#include "frc/core.hpp"

#include <cmath>

namespace frc {

double perceived_time(const PsyTimeSpec& spec, double theta) {
  if (!(theta >= 0.0)) throw Error(Errc::InvalidArgument, "tenor must be non-negative");
  switch (spec.kind) {
    case PsyTimeKind::Identity:
      return theta;
    case PsyTimeKind::LogHyperbolic:
      return spec.psi * std::log1p(theta / spec.psi);
    case PsyTimeKind::PowerLaw:
      return std::pow(theta, spec.psi_bar);
    case PsyTimeKind::RegularizedPowerLaw:
      if (spec.zeta == 1.0) return theta;
      // expm1/log1p keep the zeta -> 0 limit (log clock) accurate.
      return spec.psi / spec.zeta * std::expm1(spec.zeta * std::log1p(theta / spec.psi));
  }
  return theta;
}

double hyperbolic_discount(double psi, double r, double theta) {
  if (!(theta >= 0.0)) throw Error(Errc::InvalidArgument, "tenor must be non-negative");
  return std::pow(1.0 + theta / psi, -r * psi);
}

}  // namespace frc
