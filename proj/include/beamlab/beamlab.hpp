#pragma once

#include "beamlab/array_model.hpp"
#include "beamlab/baselines.hpp"
#include "beamlab/covariance.hpp"
#include "beamlab/errors.hpp"
#include "beamlab/experiment_config.hpp"
#include "beamlab/harness.hpp"
#include "beamlab/lcssp.hpp"
#include "beamlab/metrics.hpp"
#include "beamlab/report.hpp"
#include "beamlab/solve.hpp"
#include "beamlab/types.hpp"
#include "beamlab/weights.hpp"
