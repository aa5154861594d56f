#pragma once

// Configs, m-sweeps, refinement studies and report export.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmelimit/diagnostics.hpp"
#include "pmelimit/error.hpp"
#include "pmelimit/model.hpp"
#include "pmelimit/run.hpp"
#include "pmelimit/scenarios.hpp"

namespace pmelimit {

inline constexpr int kSummarySchemaVersion = 1;
inline constexpr double kBoundaryMassFlag = 1e-6;  // relative to the initial mass

struct InitialSpec {
  Profile profile = Profile::Bump;
  std::vector<Bump> bumps{Bump{}};
  double jitter = 0.0;  // uniform random shift of bump centres, drawn from the seed
  // Barenblatt profile only.
  double tau0 = 0.05;
  double barenblatt_C = 0.25;
};

enum class RefineScenario { Config, Barenblatt, Fund1 };

struct RefineSpec {
  std::vector<int> N_list{64, 128, 256};
  RefineScenario scenario = RefineScenario::Config;
};

struct RunConfig {
  int n = 2;
  double L = 4.0;
  int N = 128;
  std::vector<double> m_values{8.0, 16.0, 32.0, 64.0};
  GrowthLaw growth = GrowthLaw::smooth_tanh(4.0, 1.0);
  std::optional<double> pressure_ceiling = 2.0;
  DriftKernel::Kind kernel = DriftKernel::Kind::Newtonian;
  InitialSpec initial;
  double T = 0.25;
  int samples = 50;
  int snapshots = 5;  // evenly spaced over the sampling times, t = 0 and T included
  double cfl = kDefaultCfl;
  double l4_alpha = 0.5;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  RefineSpec refine;

  /// Throws Error(ConfigInvalid) naming the offending field.
  void validate() const;

  [[nodiscard]] GridSpec grid() const { return GridSpec::make(n, L, N); }
  [[nodiscard]] ModelParams params(double m) const;
  /// Initial density on `grid`; only Barenblatt data depends on m.
  [[nodiscard]] ScalarField initial_density(const GridSpec& grid, double m) const;

  static RunConfig from_json(const nlohmann::json& j);
  [[nodiscard]] nlohmann::ordered_json to_json() const;
};

/// Reads and validates a config file; IoFailure / ConfigInvalid on error.
RunConfig load_config(const std::string& path);

struct MRun {
  double m = 0.0;
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;  // density at the snapshot times
  std::size_t steps = 0;
  InitialDataBounds initial_bounds;
  double wall_seconds = 0.0;
  bool boundary_flag = false;  // boundary_mass exceeded 1e-6 of the initial mass
  // Per sampling time; used for the Cauchy distances, not exported.
  std::vector<ScalarField> p_frac_samples;
  std::vector<ScalarField> p_samples;
};

using Matrix = std::vector<std::vector<double>>;

struct SweepReport {
  RunConfig config;
  std::vector<MRun> runs;
  Matrix cauchy_frac;  // D(m, m') for ∇p^{(m+1)/m}
  Matrix cauchy_grad;  // D(m, m') for ∇p
  std::vector<double> residual_final;       // R_m at t = T
  std::vector<double> residual_integrated;  // ∫_0^T R_m dt
};

/// Tags a failure with the exponent of the run that produced it and keeps
/// the samples gathered before it.
class RunError : public Error {
 public:
  RunError(const Error& cause, double m, std::vector<DiagnosticsRecord> partial);
  [[nodiscard]] double exponent() const noexcept { return m_; }
  [[nodiscard]] const std::vector<DiagnosticsRecord>& partial() const noexcept { return partial_; }

 private:
  double m_;
  std::vector<DiagnosticsRecord> partial_;
};

/// One run at exponent m of the config's scenario.
MRun run_single(const RunConfig& config, double m, bool keep_fields = true);

/// One run per m on up to `threads` worker threads; results do not depend
/// on the thread count.
SweepReport run_m_sweep(const RunConfig& config, int threads = 1);

/// L² distance in (0,T)×box between gradients of two sampled field series,
/// trapezoid in time.
double gradient_trajectory_distance(const std::vector<ScalarField>& a, const std::vector<ScalarField>& b,
                                    const std::vector<double>& times);

struct RefinementReport {
  RefineScenario scenario = RefineScenario::Config;
  double m = 0.0;
  std::vector<int> N_list;
  // Barenblatt: L¹((0,T) x box) distance to the exact cell averages, one per N.
  // Config: final-time L¹ distance between N_k and N_{k+1}, both restricted
  // to the coarsest grid.
  std::vector<double> rho_errors;
  std::vector<double> p_errors;
  std::vector<double> rho_orders;
  std::vector<double> p_orders;
  std::vector<Fund1Check> fund1;
  std::vector<double> fund1_orders;
  std::vector<std::size_t> steps;
};

/// Throws ConfigInvalid unless N_list is strictly increasing with every
/// entry a multiple of the first.
RefinementReport run_refinement_study(const RunConfig& config, const std::vector<int>& N_list);

/// log(e_k / e_{k+1}) / log(N_{k+1} / N_k) for consecutive entries.
std::vector<double> observed_orders(const std::vector<double>& errors, const std::vector<int>& N_list);

/// Writes summary.json, diagnostics_m<m>.csv per run, snapshots/*.pmef and
/// timing.json (wall clock; kept apart so the rest is reproducible).
void export_report(const SweepReport& report, const std::string& directory);
void export_refinement(const RefinementReport& report, const std::string& directory);

nlohmann::ordered_json summary_json(const SweepReport& report);
nlohmann::ordered_json refinement_json(const RefinementReport& report);

/// File-name fragment for an exponent, e.g. 8 -> "8", 2.5 -> "2.5".
std::string exponent_tag(double m);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  bool lower_bound = false;  // pass means value >= threshold instead of <=
};

/// Operator and identity self-checks behind the `check` subcommand.
std::vector<CheckResult> run_operator_checks();

}  // namespace pmelimit
