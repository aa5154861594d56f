#include "pmelimit/run.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "pmelimit/error.hpp"

namespace pmelimit {

RunResult run(const ScalarField& init, const ModelParams& params, const RunOptions& options,
              const Observer& observer) {
  if (!(options.end_time >= 0.0) || !std::isfinite(options.end_time)) {
    throw Error(ErrorKind::ConfigInvalid, "end time must be finite and >= 0");
  }
  if (options.samples < 1) throw Error(ErrorKind::ConfigInvalid, "need at least one sampling interval");

  const InitialDataBounds bounds = initial_data_bounds(init, params.m);
  if (!std::isfinite(bounds.mass_moment) || !std::isfinite(bounds.pressure_moment)) {
    throw Error(ErrorKind::ConfigInvalid, "initial data has unbounded mass or second moment");
  }

  Stepper stepper(params, options.cfl);
  SimState state = stepper.initialize(init);
  std::vector<DiagnosticsRecord> records;

  auto sample = [&](int k, const std::optional<ScalarField>& previous, double last_dt) {
    DiagnosticsRecord rec = evaluate_diagnostics(state, options.l4_alpha);
    if (previous && last_dt > 0.0) {
      double s = 0.0;
      for (std::size_t i = 0; i < state.rho.size(); ++i) s += (state.rho[i] - (*previous)[i]) * state.p[i];
      rec.dtrho_p = s * state.rho.spec().cell_volume() / last_dt;
    }
    records.push_back(rec);
    if (observer) observer(state, records.back(), k);
  };

  sample(0, std::nullopt, 0.0);
  if (options.end_time == 0.0) return {std::move(state), std::move(records), bounds, 0};

  const double T = options.end_time;
  const int S = options.samples;
  for (int k = 1; k <= S; ++k) {
    const double target = T * k / S;
    while (true) {
      double dt = stable_dt(state, options.cfl);
      // A step that cannot move T in double precision would never finish.
      if (T + dt == T) {
        std::ostringstream msg;
        msg << "stable step " << dt << " is below the time resolution of T = " << T << " at t = " << state.t
            << ", step " << state.step_count;
        throw Error(ErrorKind::NonFiniteField, msg.str());
      }
      const bool lands = target - state.t <= dt;
      if (lands) dt = target - state.t;
      if (!lands) {
        stepper.advance(state, dt);
        continue;
      }
      std::optional<ScalarField> previous(state.rho);
      if (dt > 0.0) stepper.advance(state, dt);
      state.t = target;
      sample(k, previous, dt);
      break;
    }
  }
  const std::size_t steps = state.step_count;
  return {std::move(state), std::move(records), bounds, steps};
}

}  // namespace pmelimit
