#pragma once

// Umbrella header for the robust matrix-completion toolkit.

#include "rmc/datagen.hpp"
#include "rmc/errors.hpp"
#include "rmc/experiments.hpp"
#include "rmc/losses.hpp"
#include "rmc/masked.hpp"
#include "rmc/mmio.hpp"
#include "rmc/rng.hpp"
#include "rmc/run_io.hpp"
#include "rmc/solver.hpp"
#include "rmc/types.hpp"
#include "rmc/version.hpp"
