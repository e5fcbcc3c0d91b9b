// Uniform entry point for model-generated correlation surfaces.
#pragma once

#include "frc/bbdl.hpp"
#include "frc/core.hpp"

namespace frc {

struct ModelOptions {
  int n_mat = kDefaultMatrixSize;  // BBDL operator size
};

/// Dispatches on params.variant to the continuous, discrete or BBDL model.
CorrelationSurface model_surface(const ModelParams& params, const TenorGrid& grid, const ModelOptions& options = {});

}  // namespace frc
