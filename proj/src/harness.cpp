#include "pmelimit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "pmelimit/error.hpp"
#include "pmelimit/potential.hpp"

namespace pmelimit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::ConfigInvalid, field + ": " + why);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) invalid(path.empty() ? "config" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      invalid(join(path, key), "unknown field");
    }
  }
}

double number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) invalid(join(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(join(path, key), "must be finite");
  return x;
}

long long integer(const json& obj, const std::string& path, const char* key, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) invalid(join(path, key), "expected an integer");
  return v.get<long long>();
}

std::string text(const json& obj, const std::string& path, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) invalid(join(path, key), "expected a string");
  return v.get<std::string>();
}

const json& array(const json& obj, const std::string& path, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_array()) invalid(join(path, key), "expected an array");
  return v;
}

DriftKernel::Kind parse_kernel(const std::string& name) {
  if (name == "off") return DriftKernel::Kind::Off;
  if (name == "newtonian") return DriftKernel::Kind::Newtonian;
  if (name == "custom") invalid("kernel", "custom kernels are only available through the library API");
  invalid("kernel", "unknown kernel '" + name + "'");
}

GrowthLaw::Kind parse_growth_kind(const std::string& name) {
  if (name == "off") return GrowthLaw::Kind::Off;
  if (name == "smooth_tanh") return GrowthLaw::Kind::SmoothTanh;
  invalid("growth.kind", "unknown growth law '" + name + "'");
}

std::string_view to_string(RefineScenario s) {
  switch (s) {
    case RefineScenario::Config: return "config";
    case RefineScenario::Barenblatt: return "barenblatt";
    case RefineScenario::Fund1: return "fund1";
  }
  return "unknown";
}

RefineScenario parse_refine_scenario(const std::string& name) {
  if (name == "config") return RefineScenario::Config;
  if (name == "barenblatt") return RefineScenario::Barenblatt;
  if (name == "fund1") return RefineScenario::Fund1;
  invalid("refine.scenario", "unknown scenario '" + name + "'");
}

std::vector<int> snapshot_indices(int samples, int snapshots) {
  std::vector<int> out;
  if (snapshots <= 0) return out;
  if (snapshots == 1) return {samples};
  for (int k = 0; k < snapshots; ++k) {
    const int idx = static_cast<int>(std::lround(static_cast<double>(k) * samples / (snapshots - 1)));
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

std::string strip_kind_prefix(const Error& e) {
  const std::string what = e.what();
  const std::string prefix = std::string(to_string(e.kind())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

void check_n_list(const std::vector<int>& N_list) {
  if (N_list.empty()) invalid("refine.N_list", "must not be empty");
  for (std::size_t k = 0; k < N_list.size(); ++k) {
    if (N_list[k] < 4) invalid("refine.N_list", "entries must be >= 4");
    if (k > 0 && N_list[k] <= N_list[k - 1]) invalid("refine.N_list", "must be strictly increasing");
    if (N_list[k] % N_list[0] != 0) invalid("refine.N_list", "entries must be multiples of the first");
  }
}

ordered_json record_json(const DiagnosticsRecord& rec) {
  ordered_json obj = ordered_json::object();
  for (const auto& name : diagnostics_columns()) obj[name] = rec.*diagnostics_member(name);
  return obj;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  os << content;
  if (!os) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

void make_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double total = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) total += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
  return total;
}

std::string snapshot_name(double m, int sample) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", sample);
  return "rho_m" + exponent_tag(m) + "_s" + buf + ".pmef";
}

}  // namespace

// --- config ------------------------------------------------------------------

void RunConfig::validate() const {
  try {
    (void)GridSpec::make(n, L, N);
  } catch (const Error& e) {
    invalid("grid", strip_kind_prefix(e));
  }
  if (m_values.empty()) invalid("m", "must not be empty");
  for (std::size_t k = 0; k < m_values.size(); ++k) {
    if (!(m_values[k] >= 2.0)) invalid("m", "every exponent must be >= 2");
    if (k > 0 && !(m_values[k] > m_values[k - 1])) invalid("m", "must be strictly increasing");
  }
  if (kernel == DriftKernel::Kind::Newtonian && n == 1) invalid("kernel", "newtonian drift needs n = 2 or 3");
  try {
    growth.validate();
  } catch (const Error& e) {
    invalid("growth", strip_kind_prefix(e));
  }
  if (pressure_ceiling) {
    const GrowthValidation v = validate_growth_law(growth, *pressure_ceiling);
    if (!v.passed()) invalid("P_M", v.message);
  }
  if (initial.profile == Profile::Barenblatt) {
    if (!(initial.tau0 > 0.0)) invalid("initial.tau0", "must be > 0");
    if (!(initial.barenblatt_C > 0.0)) invalid("initial.C", "must be > 0");
  } else {
    if (initial.bumps.empty()) invalid("initial.bumps", "must not be empty");
    for (std::size_t b = 0; b < initial.bumps.size(); ++b) {
      const std::string at = "initial.bumps[" + std::to_string(b) + "]";
      if (!(initial.bumps[b].radius > 0.0)) invalid(at + ".radius", "must be > 0");
      const double a = initial.bumps[b].amplitude;
      if (!(a > 0.0 && a <= 1.0)) invalid(at + ".amplitude", "must lie in (0, 1]");
    }
  }
  if (!(initial.jitter >= 0.0)) invalid("initial.jitter", "must be >= 0");
  if (!(T >= 0.0)) invalid("T", "must be >= 0");
  if (samples < 1) invalid("samples", "must be >= 1");
  if (snapshots < 0) invalid("snapshots", "must be >= 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) invalid("cfl", "must lie in (0, 1]");
  if (!(l4_alpha >= 0.0 && l4_alpha < 1.0)) invalid("l4_alpha", "must lie in [0, 1)");
  check_n_list(refine.N_list);
}

ModelParams RunConfig::params(double m) const {
  ModelParams p;
  p.m = m;
  p.growth = growth;
  p.kernel = kernel == DriftKernel::Kind::Newtonian ? DriftKernel::newtonian() : DriftKernel::off();
  p.grid = grid();
  p.pressure_ceiling = pressure_ceiling;
  return p;
}

ScalarField RunConfig::initial_density(const GridSpec& g, double m) const {
  if (initial.profile == Profile::Barenblatt) {
    return Barenblatt{g.dim(), m, initial.barenblatt_C}.cell_average(g, initial.tau0);
  }
  std::vector<Bump> bumps = initial.bumps;
  if (initial.jitter > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> shift(-initial.jitter, initial.jitter);
    for (auto& b : bumps) {
      for (int d = 0; d < g.dim(); ++d) b.center[d] += shift(rng);
    }
  }
  return bumps_field(g, initial.profile, bumps);
}

RunConfig RunConfig::from_json(const json& j) {
  check_keys(j, "", {"grid", "m", "growth", "P_M", "kernel", "initial", "T", "samples", "snapshots", "cfl",
                     "l4_alpha", "output", "seed", "refine"});
  RunConfig c;
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, "grid", {"n", "L", "N"});
    c.n = static_cast<int>(integer(g, "grid", "n", c.n));
    c.L = number(g, "grid", "L", c.L);
    c.N = static_cast<int>(integer(g, "grid", "N", c.N));
  }
  if (j.contains("m")) {
    c.m_values.clear();
    for (const auto& v : array(j, "", "m")) {
      if (!v.is_number()) invalid("m", "expected numbers");
      c.m_values.push_back(v.get<double>());
    }
  }
  if (j.contains("growth")) {
    const json& g = j.at("growth");
    check_keys(g, "growth", {"kind", "G_M", "p_H"});
    const auto kind = parse_growth_kind(text(g, "growth", "kind", "smooth_tanh"));
    if (kind == GrowthLaw::Kind::Off) {
      c.growth = GrowthLaw::off();
    } else {
      c.growth = GrowthLaw::smooth_tanh(number(g, "growth", "G_M", 4.0), number(g, "growth", "p_H", 1.0));
    }
  }
  if (j.contains("P_M")) {
    if (j.at("P_M").is_null()) {
      c.pressure_ceiling.reset();
    } else {
      c.pressure_ceiling = number(j, "", "P_M", 0.0);
    }
  }
  c.kernel = parse_kernel(text(j, "", "kernel", "newtonian"));
  if (j.contains("initial")) {
    const json& ini = j.at("initial");
    check_keys(ini, "initial", {"profile", "bumps", "jitter", "tau0", "C"});
    c.initial.profile = parse_profile(text(ini, "initial", "profile", "bump"));
    if (ini.contains("bumps")) {
      c.initial.bumps.clear();
      const json& list = array(ini, "initial", "bumps");
      for (std::size_t b = 0; b < list.size(); ++b) {
        const std::string at = "initial.bumps[" + std::to_string(b) + "]";
        check_keys(list[b], at, {"center", "radius", "amplitude"});
        Bump bump;
        if (list[b].contains("center")) {
          const json& ctr = array(list[b], at, "center");
          if (ctr.size() > 3) invalid(at + ".center", "at most 3 coordinates");
          for (std::size_t d = 0; d < ctr.size(); ++d) {
            if (!ctr[d].is_number()) invalid(at + ".center", "expected numbers");
            bump.center[d] = ctr[d].get<double>();
          }
        }
        bump.radius = number(list[b], at, "radius", bump.radius);
        bump.amplitude = number(list[b], at, "amplitude", bump.amplitude);
        c.initial.bumps.push_back(bump);
      }
    }
    c.initial.jitter = number(ini, "initial", "jitter", c.initial.jitter);
    c.initial.tau0 = number(ini, "initial", "tau0", c.initial.tau0);
    c.initial.barenblatt_C = number(ini, "initial", "C", c.initial.barenblatt_C);
  }
  c.T = number(j, "", "T", c.T);
  c.samples = static_cast<int>(integer(j, "", "samples", c.samples));
  c.snapshots = static_cast<int>(integer(j, "", "snapshots", c.snapshots));
  c.cfl = number(j, "", "cfl", c.cfl);
  c.l4_alpha = number(j, "", "l4_alpha", c.l4_alpha);
  c.output_dir = text(j, "", "output", c.output_dir);
  const long long seed = integer(j, "", "seed", 0);
  if (seed < 0) invalid("seed", "must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  if (j.contains("refine")) {
    const json& r = j.at("refine");
    check_keys(r, "refine", {"N_list", "scenario"});
    if (r.contains("N_list")) {
      c.refine.N_list.clear();
      for (const auto& v : array(r, "refine", "N_list")) {
        if (!v.is_number_integer()) invalid("refine.N_list", "expected integers");
        c.refine.N_list.push_back(v.get<int>());
      }
    }
    c.refine.scenario = parse_refine_scenario(text(r, "refine", "scenario", "config"));
  }
  c.validate();
  return c;
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["grid"] = {{"n", n}, {"L", L}, {"N", N}};
  j["m"] = m_values;
  ordered_json g;
  g["kind"] = std::string(pmelimit::to_string(growth.kind));
  if (growth.kind != GrowthLaw::Kind::Off) {
    g["G_M"] = growth.max_rate;
    g["p_H"] = growth.homeostatic_pressure;
  }
  j["growth"] = g;
  j["P_M"] = pressure_ceiling ? ordered_json(*pressure_ceiling) : ordered_json(nullptr);
  j["kernel"] = std::string(pmelimit::to_string(kernel));
  ordered_json ini;
  ini["profile"] = std::string(pmelimit::to_string(initial.profile));
  if (initial.profile == Profile::Barenblatt) {
    ini["tau0"] = initial.tau0;
    ini["C"] = initial.barenblatt_C;
  } else {
    ordered_json bumps = ordered_json::array();
    for (const auto& b : initial.bumps) {
      bumps.push_back({{"center", std::vector<double>(b.center.begin(), b.center.begin() + n)},
                       {"radius", b.radius},
                       {"amplitude", b.amplitude}});
    }
    ini["bumps"] = bumps;
    ini["jitter"] = initial.jitter;
  }
  j["initial"] = ini;
  j["T"] = T;
  j["samples"] = samples;
  j["snapshots"] = snapshots;
  j["cfl"] = cfl;
  j["l4_alpha"] = l4_alpha;
  j["output"] = output_dir;
  j["seed"] = seed;
  j["refine"] = {{"N_list", refine.N_list}, {"scenario", std::string(to_string(refine.scenario))}};
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::IoFailure, "cannot read config " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigInvalid, path + ": " + e.what());
  }
  return RunConfig::from_json(j);
}

// --- sweeps ------------------------------------------------------------------

RunError::RunError(const Error& cause, double m, std::vector<DiagnosticsRecord> partial)
    : Error(cause.kind(), "run m = " + exponent_tag(m) + ": " + strip_kind_prefix(cause)),
      m_(m),
      partial_(std::move(partial)) {}

std::string exponent_tag(double m) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, m);
  return std::string(buf, res.ptr);
}

MRun run_single(const RunConfig& config, double m, bool keep_fields) {
  const auto start = std::chrono::steady_clock::now();
  const GridSpec grid = config.grid();
  const ModelParams params = config.params(m);
  const ScalarField init = config.initial_density(grid, m);
  const std::vector<int> snap_at = snapshot_indices(config.samples, config.snapshots);

  MRun out;
  out.m = m;
  RunOptions options{config.T, config.samples, config.cfl, config.l4_alpha};
  auto observer = [&](const SimState& s, const DiagnosticsRecord& rec, int k) {
    out.records.push_back(rec);
    if (std::binary_search(snap_at.begin(), snap_at.end(), k)) out.snapshots.push_back({s.rho, s.t, m});
    if (keep_fields) {
      const PressurePowers pw = pressure_powers(s.rho, m);
      out.p_frac_samples.push_back(pw.p_frac);
      out.p_samples.push_back(pw.p);
    }
  };
  const RunResult result = [&] {
    try {
      return run(init, params, options, observer);
    } catch (const Error& e) {
      throw RunError(e, m, out.records);
    }
  }();
  out.steps = result.steps;
  out.initial_bounds = result.initial_bounds;
  const double threshold = kBoundaryMassFlag * out.records.front().mass;
  out.boundary_flag = std::any_of(out.records.begin(), out.records.end(),
                                  [&](const DiagnosticsRecord& r) { return r.boundary_mass > threshold; });
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

double gradient_trajectory_distance(const std::vector<ScalarField>& a, const std::vector<ScalarField>& b,
                                    const std::vector<double>& times) {
  if (a.size() != b.size() || a.size() != times.size()) {
    throw Error(ErrorKind::InvalidArgument, "trajectories are sampled at different times");
  }
  std::vector<double> sq(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) sq[k] = integrate(gradient_energy_density(axpy(-1.0, b[k], a[k])));
  return std::sqrt(trapezoid(times, sq));
}

SweepReport run_m_sweep(const RunConfig& config, int threads) {
  config.validate();
  const std::size_t count = config.m_values.size();
  std::vector<MRun> runs(count);
  std::vector<std::exception_ptr> failures(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        runs[i] = run_single(config, config.m_values[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const int pool = std::clamp(threads, 1, static_cast<int>(count));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> workers;
    for (int w = 0; w < pool; ++w) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  SweepReport report;
  report.config = config;
  std::vector<double> times;
  for (const auto& r : runs.front().records) times.push_back(r.t);
  report.cauchy_frac.assign(count, std::vector<double>(count, 0.0));
  report.cauchy_grad.assign(count, std::vector<double>(count, 0.0));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = i + 1; k < count; ++k) {
      const double df = gradient_trajectory_distance(runs[i].p_frac_samples, runs[k].p_frac_samples, times);
      const double dg = gradient_trajectory_distance(runs[i].p_samples, runs[k].p_samples, times);
      report.cauchy_frac[i][k] = report.cauchy_frac[k][i] = df;
      report.cauchy_grad[i][k] = report.cauchy_grad[k][i] = dg;
    }
  }
  for (auto& r : runs) {
    report.residual_final.push_back(r.records.back().comp_residual);
    report.residual_integrated.push_back(time_integral(r.records, &DiagnosticsRecord::comp_residual));
    r.p_frac_samples.clear();
    r.p_samples.clear();
  }
  report.runs = std::move(runs);
  return report;
}

// --- refinement --------------------------------------------------------------

std::vector<double> observed_orders(const std::vector<double>& errors, const std::vector<int>& N_list) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < errors.size() && k + 1 < N_list.size(); ++k) {
    const double ratio = static_cast<double>(N_list[k + 1]) / N_list[k];
    out.push_back(std::log(errors[k] / errors[k + 1]) / std::log(ratio));
  }
  return out;
}

RefinementReport run_refinement_study(const RunConfig& config, const std::vector<int>& N_list) {
  check_n_list(N_list);
  RefinementReport rep;
  rep.scenario = config.refine.scenario;
  rep.m = config.m_values.front();
  rep.N_list = N_list;

  if (rep.scenario == RefineScenario::Fund1) {
    std::vector<double> errs;
    for (int N : N_list) {
      const GridSpec g = GridSpec::make(config.n, config.L, N);
      const ScalarField p = ScalarField::sample(g, [&](const Point& x) {
        return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
      });
      rep.fund1.push_back(identity_check_fund1(p));
      errs.push_back(rep.fund1.back().rel_err);
    }
    rep.fund1_orders = observed_orders(errs, N_list);
    return rep;
  }

  RunConfig c = config;
  if (rep.scenario == RefineScenario::Barenblatt) {
    c.growth = GrowthLaw::off();
    c.pressure_ceiling.reset();
    c.kernel = DriftKernel::Kind::Off;
    c.initial.profile = Profile::Barenblatt;
  }
  const bool oracle = rep.scenario == RefineScenario::Barenblatt;
  const Barenblatt exact{c.n, rep.m, c.initial.barenblatt_C};
  const RunOptions options{c.T, oracle ? c.samples : 1, c.cfl, c.l4_alpha};
  const GridSpec coarsest = GridSpec::make(c.n, c.L, N_list.front());
  std::vector<ScalarField> rho_coarse;
  std::vector<ScalarField> p_coarse;
  for (int N : N_list) {
    c.N = N;
    c.validate();
    const GridSpec g = c.grid();
    // Barenblatt errors are L¹ over (0,T) x box, trapezoid over the samples.
    std::vector<double> times, rho_err, p_err;
    auto observer = [&](const SimState& s, const DiagnosticsRecord&, int) {
      if (!oracle) return;
      const ScalarField ref = exact.cell_average(g, exact.tau_after(c.initial.tau0, s.t));
      times.push_back(s.t);
      rho_err.push_back(l1_distance(s.rho, ref));
      p_err.push_back(l1_distance(s.p, pressure(ref, rep.m)));
    };
    const RunResult r = [&] {
      try {
        return run(c.initial_density(g, rep.m), c.params(rep.m), options, observer);
      } catch (const Error& e) {
        throw RunError(e, rep.m, {});
      }
    }();
    rep.steps.push_back(r.steps);
    if (oracle) {
      rep.rho_errors.push_back(trapezoid(times, rho_err));
      rep.p_errors.push_back(trapezoid(times, p_err));
    } else {
      rho_coarse.push_back(restrict_to(r.final_state.rho, coarsest));
      p_coarse.push_back(restrict_to(r.final_state.p, coarsest));
    }
  }
  if (rep.scenario == RefineScenario::Config) {
    for (std::size_t k = 0; k + 1 < rho_coarse.size(); ++k) {
      rep.rho_errors.push_back(l1_distance(rho_coarse[k], rho_coarse[k + 1]));
      rep.p_errors.push_back(l1_distance(p_coarse[k], p_coarse[k + 1]));
    }
  }
  rep.rho_orders = observed_orders(rep.rho_errors, N_list);
  rep.p_orders = observed_orders(rep.p_errors, N_list);
  return rep;
}

// --- export ------------------------------------------------------------------

ordered_json summary_json(const SweepReport& report) {
  ordered_json j;
  j["schema_version"] = kSummarySchemaVersion;
  const bool empty = report.runs.empty();
  j["config"] = empty ? ordered_json::object() : report.config.to_json();
  // The limit results cover n >= 2; 1-D runs are plumbing only.
  j["outside_theory"] = !empty && report.config.n == 1;
  ordered_json ms = ordered_json::array();
  ordered_json times = ordered_json::array();
  if (!empty) {
    for (const auto& r : report.runs.front().records) times.push_back(r.t);
  }
  ordered_json runs = ordered_json::array();
  ordered_json excess = ordered_json::array(), pom = ordered_json::array(), defect = ordered_json::array();
  static const char* kIntegrated[] = {"grad_p_sq", "grad_p_frac_sq", "grad_p_frac2_sq", "grad_p_half_sq",
                                      "rho_pow_int", "l4_value", "hess_energy", "stiff_energy",
                                      "comp_residual", "comp_residual_dphi", "comp_residual_literal",
                                      "est1_lhs", "est1_rhs", "excess", "p_times_onemrho",
                                      "rho_gradp_defect"};
  for (const auto& r : report.runs) {
    ms.push_back(r.m);
    ordered_json run;
    run["m"] = r.m;
    run["csv"] = "diagnostics_m" + exponent_tag(r.m) + ".csv";
    run["steps"] = r.steps;
    run["records"] = r.records.size();
    run["boundary_flag"] = r.boundary_flag;
    run["initial_bounds"] = {{"mass_moment", r.initial_bounds.mass_moment},
                             {"pressure_moment", r.initial_bounds.pressure_moment}};
    ordered_json snaps = ordered_json::array();
    for (const auto& s : r.snapshots) {
      const auto it = std::find_if(r.records.begin(), r.records.end(),
                                   [&](const DiagnosticsRecord& rec) { return rec.t == s.time; });
      snaps.push_back({{"t", s.time},
                       {"file", "snapshots/" + snapshot_name(r.m, static_cast<int>(it - r.records.begin()))}});
    }
    run["snapshots"] = snaps;
    ordered_json integrals;
    for (const char* name : kIntegrated) integrals[name] = time_integral(r.records, diagnostics_member(name));
    run["time_integrals"] = integrals;
    run["final"] = record_json(r.records.back());
    runs.push_back(run);
    excess.push_back(r.records.back().excess);
    pom.push_back(r.records.back().p_times_onemrho);
    defect.push_back(r.records.back().rho_gradp_defect);
  }
  j["m"] = ms;
  j["sample_times"] = times;
  j["runs"] = runs;
  j["residual"] = {{"final", report.residual_final}, {"integrated", report.residual_integrated}};
  ordered_json integrated = ordered_json::object();
  for (const char* name : {"excess", "p_times_onemrho", "rho_gradp_defect"}) {
    integrated[name] = ordered_json::array();
    for (const auto& r : report.runs) integrated[name].push_back(time_integral(r.records, diagnostics_member(name)));
  }
  j["proxies"] = {{"final", {{"excess", excess}, {"p_times_onemrho", pom}, {"rho_gradp_defect", defect}}},
                  {"integrated", integrated}};
  j["cauchy"] = {{"grad_p_frac", report.cauchy_frac}, {"grad_p", report.cauchy_grad}};
  return j;
}

void export_report(const SweepReport& report, const std::string& directory) {
  const std::filesystem::path dir(directory);
  make_directory(dir);
  write_text(dir / "summary.json", summary_json(report).dump(2) + "\n");
  ordered_json timing;
  timing["runs"] = ordered_json::array();
  for (const auto& r : report.runs) {
    std::ostringstream csv;
    write_csv(csv, r.records);
    write_text(dir / ("diagnostics_m" + exponent_tag(r.m) + ".csv"), csv.str());
    if (!r.snapshots.empty()) make_directory(dir / "snapshots");
    for (const auto& s : r.snapshots) {
      const auto it = std::find_if(r.records.begin(), r.records.end(),
                                   [&](const DiagnosticsRecord& rec) { return rec.t == s.time; });
      write_snapshot((dir / "snapshots" / snapshot_name(r.m, static_cast<int>(it - r.records.begin()))).string(),
                     s);
    }
    timing["runs"].push_back({{"m", r.m}, {"wall_seconds", r.wall_seconds}, {"steps", r.steps}});
  }
  write_text(dir / "timing.json", timing.dump(2) + "\n");
}

ordered_json refinement_json(const RefinementReport& rep) {
  ordered_json j;
  j["schema_version"] = kSummarySchemaVersion;
  j["scenario"] = std::string(to_string(rep.scenario));
  j["m"] = rep.m;
  j["N_list"] = rep.N_list;
  j["steps"] = rep.steps;
  j["rho_l1_errors"] = rep.rho_errors;
  j["p_l1_errors"] = rep.p_errors;
  j["rho_orders"] = rep.rho_orders;
  j["p_orders"] = rep.p_orders;
  ordered_json f = ordered_json::array();
  for (std::size_t k = 0; k < rep.fund1.size(); ++k) {
    f.push_back({{"N", rep.N_list[k]},
                 {"lhs", rep.fund1[k].lhs},
                 {"rhs", rep.fund1[k].rhs},
                 {"rel_err", rep.fund1[k].rel_err}});
  }
  j["fund1"] = f;
  j["fund1_orders"] = rep.fund1_orders;
  return j;
}

void export_refinement(const RefinementReport& report, const std::string& directory) {
  const std::filesystem::path dir(directory);
  make_directory(dir);
  write_text(dir / "refinement.json", refinement_json(report).dump(2) + "\n");
}

}  // namespace pmelimit
