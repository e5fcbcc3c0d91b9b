#include "frc/models.hpp"

#include "frc/continuous.hpp"
#include "frc/discrete.hpp"

namespace frc {

CorrelationSurface model_surface(const ModelParams& params, const TenorGrid& grid, const ModelOptions& options) {
  validate_params(params);
  switch (params.variant) {
    case Variant::BB04:
    case Variant::BBL3:
    case Variant::BBL2:
      return continuous_surface(params, grid);
    case Variant::BBD3:
    case Variant::BBD2:
      return discrete_surface(params, grid);
    case Variant::BBDL:
      return rho_bbdl(*params.kappa, grid, options.n_mat);
  }
  throw Error(Errc::InvalidArgument, "unknown variant");
}

}  // namespace frc
