#pragma once

// Umbrella header for the LBD changepoint detection library.

#include "lbd/calibration.hpp"
#include "lbd/csv.hpp"
#include "lbd/detector.hpp"
#include "lbd/diagnostics.hpp"
#include "lbd/errors.hpp"
#include "lbd/grid.hpp"
#include "lbd/intervals.hpp"
#include "lbd/local_tests.hpp"
#include "lbd/math.hpp"
#include "lbd/rng.hpp"
#include "lbd/signals.hpp"
#include "lbd/simulate.hpp"
