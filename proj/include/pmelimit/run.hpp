#pragma once

#include <functional>
#include <vector>

#include "pmelimit/diagnostics.hpp"
#include "pmelimit/stepper.hpp"

namespace pmelimit {

struct RunOptions {
  double end_time = 0.0;
  int samples = 50;  // sampling intervals; records land at k*T/samples, k = 0..samples
  double cfl = kDefaultCfl;
  double l4_alpha = 0.5;
};

/// Called at each sampling time with the state and its freshly computed record.
using Observer = std::function<void(const SimState&, const DiagnosticsRecord&, int sample)>;

struct RunResult {
  SimState final_state;
  std::vector<DiagnosticsRecord> records;
  InitialDataBounds initial_bounds;
  std::size_t steps = 0;
};

/// Advances `init` to end_time with dt = stable_dt, clipped so that every
/// sampling time is hit exactly. With end_time = 0 the result holds the
/// initial state and a single record.
///
/// Throws ConfigInvalid for bad options or initial data with non-finite
/// mass / second moment, NonFiniteField when the stable step is too small to
/// change T in double precision, and propagates stepping errors.
RunResult run(const ScalarField& init, const ModelParams& params, const RunOptions& options,
              const Observer& observer = {});

}  // namespace pmelimit
