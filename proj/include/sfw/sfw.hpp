#pragma once

// Umbrella header for the whole library.

#include "sfw/block_vector.hpp"
#include "sfw/diagnostics.hpp"
#include "sfw/directions.hpp"
#include "sfw/domain.hpp"
#include "sfw/experiments.hpp"
#include "sfw/globalopt.hpp"
#include "sfw/io.hpp"
#include "sfw/quadratic.hpp"
#include "sfw/rng.hpp"
#include "sfw/solver.hpp"
#include "sfw/ssc.hpp"
