#pragma once

#include "swarmsim/calibration.hpp"
#include "swarmsim/core.hpp"
#include "swarmsim/engine.hpp"
#include "swarmsim/metrics.hpp"
#include "swarmsim/models.hpp"
#include "swarmsim/output.hpp"
#include "swarmsim/presets.hpp"
#include "swarmsim/scenario.hpp"
#include "swarmsim/scenario_io.hpp"
