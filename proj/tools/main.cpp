// pmelimit command-line driver.
//
// Exit codes: 0 success, 2 configuration / input error, 3 numerical failure
// (a failure_dump.json with the partial diagnostics is written to --out).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmelimit/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config_path;
  std::string out;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> m;
  std::string export_path;
};

pmelimit::RunConfig resolve(const Options& o) {
  pmelimit::RunConfig c = pmelimit::load_config(o.config_path);
  if (!o.out.empty()) c.output_dir = o.out;
  if (o.seed) c.seed = *o.seed;
  return c;
}

void dump_failure(const std::string& dir, const pmelimit::Error& e) {
  nlohmann::ordered_json j;
  j["error"] = std::string(pmelimit::to_string(e.kind()));
  j["message"] = e.what();
  const auto* run_error = dynamic_cast<const pmelimit::RunError*>(&e);
  if (run_error) {
    j["m"] = run_error->exponent();
    j["partial_records"] = nlohmann::ordered_json::parse(pmelimit::to_json(run_error->partial()));
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream os(std::filesystem::path(dir) / "failure_dump.json");
  if (os) {
    os << j.dump(2) << "\n";
    std::cerr << "diagnostics dump written to " << (std::filesystem::path(dir) / "failure_dump.json").string()
              << "\n";
  }
}

void print_sweep(const pmelimit::SweepReport& r) {
  std::printf("%8s %10s %14s %14s %12s %12s\n", "m", "steps", "R_m(T)", "int R_m", "sup_rho(T)", "sup_p(T)");
  for (std::size_t k = 0; k < r.runs.size(); ++k) {
    const auto& run = r.runs[k];
    const auto& last = run.records.back();
    std::printf("%8g %10zu %14.6e %14.6e %12.6f %12.6f%s\n", run.m, run.steps, r.residual_final[k],
                r.residual_integrated[k], last.sup_rho, last.sup_p, run.boundary_flag ? "  [boundary mass]" : "");
  }
}

int cmd_sweep(const Options& o, bool single) {
  pmelimit::RunConfig c = resolve(o);
  if (single) {
    const double m = o.m.value_or(c.m_values.front());
    c.m_values = {m};
    c.validate();
  }
  try {
    const pmelimit::SweepReport report = pmelimit::run_m_sweep(c, o.threads);
    pmelimit::export_report(report, c.output_dir);
    print_sweep(report);
    std::printf("results written to %s\n", c.output_dir.c_str());
  } catch (const pmelimit::Error& e) {
    if (e.is_numerical()) dump_failure(c.output_dir, e);
    throw;
  }
  return kExitOk;
}

int cmd_refine(const Options& o) {
  const pmelimit::RunConfig c = resolve(o);
  try {
    const pmelimit::RefinementReport rep = pmelimit::run_refinement_study(c, c.refine.N_list);
    pmelimit::export_refinement(rep, c.output_dir);
    std::cout << pmelimit::refinement_json(rep).dump(2) << "\n";
  } catch (const pmelimit::Error& e) {
    if (e.is_numerical()) dump_failure(c.output_dir, e);
    throw;
  }
  return kExitOk;
}

int cmd_check() {
  bool all = true;
  for (const auto& r : pmelimit::run_operator_checks()) {
    std::printf("%-6s %-34s value=%.3e %s %.3e\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.value,
                r.lower_bound ? ">=" : "<=", r.threshold);
    all = all && r.passed;
  }
  return all ? kExitOk : kExitNumerical;
}

int cmd_export_config(const Options& o) {
  const std::string text = pmelimit::RunConfig{}.to_json().dump(2) + "\n";
  if (o.export_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream os(o.export_path);
  if (!os || !(os << text)) throw pmelimit::Error(pmelimit::ErrorKind::IoFailure, "cannot write " + o.export_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Porous-medium / Keller-Segel simulator and stiff-limit verification harness"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool threads) {
    sub->add_option("config", o.config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (overrides the config)");
    sub->add_option("--seed", o.seed, "seed for randomized initial data");
    if (threads) sub->add_option("--threads", o.threads, "worker threads for the m-sweep")->check(CLI::PositiveNumber);
  };
  CLI::App* run = app.add_subcommand("run", "single run at one exponent");
  add_common(run, false);
  run->add_option("--m", o.m, "exponent (default: first entry of the config's m list)");
  CLI::App* sweep = app.add_subcommand("sweep", "one run per exponent plus cross-m metrics");
  add_common(sweep, true);
  CLI::App* refine = app.add_subcommand("refine", "grid refinement study");
  add_common(refine, false);
  app.add_subcommand("check", "operator and identity self-checks");
  CLI::App* exp = app.add_subcommand("export-config", "print the default config");
  exp->add_option("--out", o.export_path, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_sweep(o, true);
    if (*sweep) return cmd_sweep(o, false);
    if (*refine) return cmd_refine(o);
    if (app.got_subcommand("check")) return cmd_check();
    return cmd_export_config(o);
  } catch (const pmelimit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_numerical() ? kExitNumerical : kExitConfig;
  }
}
