#pragma once

// Umbrella header: the whole library in dependency order.

#include "traceinv/signal.hpp"     // grids, traces, quadrature, pulses
#include "traceinv/parallel.hpp"   // deterministic static-partition parallel_for
#include "traceinv/forward.hpp"    // geometry, forward/adjoint/normal maps
#include "traceinv/fwi.hpp"        // fixed-support least-squares landscape
#include "traceinv/extended.hpp"   // penalty-extended reduced objective
#include "traceinv/solver.hpp"     // scenarios, scans, discrepancy inversion, bounds
#include "traceinv/csv.hpp"        // serialization
#include "traceinv/config.hpp"     // flat key = value runs
#include "traceinv/experiments.hpp"  // named experiments / exit codes
