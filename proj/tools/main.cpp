// confbaryo: run | diagnostics | sweep
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "confbaryo/diagnostics.hpp"
#include "confbaryo/run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDiagnostics = 4;

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> tolerance;
  std::vector<int> only;
};

std::optional<int> env_threads() {
  const char* v = std::getenv("CONFBARYO_THREADS");
  if (!v || !*v) return std::nullopt;
  try {
    const int n = std::stoi(v);
    if (n >= 1) return n;
  } catch (const std::exception&) {
  }
  std::cerr << "warning: ignoring CONFBARYO_THREADS='" << v << "'\n";
  return std::nullopt;
}

cb::ConfigOverrides overrides(const Flags& f) {
  cb::ConfigOverrides ov;
  ov.seed = f.seed;
  ov.threads = f.threads ? f.threads : env_threads();
  ov.tolerance = f.tolerance;
  ov.out_dir = f.out;
  return ov;
}

void add_common(CLI::App* sub, Flags& f, bool config_required) {
  auto* c = sub->add_option("--config", f.config, "JSON run configuration");
  if (config_required) c->required();
  sub->add_option("--out", f.out, "output directory (overrides output.dir)");
  sub->add_option("--seed", f.seed, "random seed (overrides the config)");
  sub->add_option("--threads", f.threads, "worker threads (default: CONFBARYO_THREADS or the config)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--tolerance", f.tolerance, "relative quadrature tolerance")->check(CLI::PositiveNumber);
}

int report_outcome(const cb::RunOutcome& o) {
  std::cout << o.message << "\n";
  for (const auto& f : o.files) std::cout << "  wrote " << f << "\n";
  return o.exit_code;
}

std::string csv_number(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

int run_diagnostics(const Flags& f) {
  cb::DiagnosticsOptions opt;
  std::string hash = "none";
  std::string out_dir = "out";
  if (!f.config.empty()) {
    const cb::RunConfig cfg = cb::load_config(f.config, overrides(f));
    opt.seed = cfg.request.quad.seed;
    opt.threads = cfg.request.quad.threads;
    hash = cfg.hash;
    out_dir = cfg.out_dir;
  }
  if (f.seed) opt.seed = *f.seed;
  if (f.threads) {
    opt.threads = *f.threads;
  } else if (f.config.empty()) {
    if (auto t = env_threads()) opt.threads = *t;
  }
  if (f.out) out_dir = *f.out;

  std::vector<cb::CheckResult> results;
  if (f.only.empty()) {
    results = cb::run_all(opt);
  } else {
    for (int id : f.only) results.push_back(cb::run_criterion(id, opt));
  }
  bool all = true;
  ordered_json j;
  j["format"] = "confbaryo-diagnostics/1";
  j["config_hash"] = hash;
  j["seed"] = opt.seed;
  ordered_json rows = ordered_json::array();
  for (const auto& r : results) {
    std::cout << cb::format_check(r) << "\n";
    all = all && r.pass;
    rows.push_back({{"criterion", r.criterion},
                    {"name", r.name},
                    {"pass", r.pass},
                    {"measured", r.measured},
                    {"threshold", r.threshold},
                    {"detail", r.detail}});
  }
  j["checks"] = rows;
  const double chi = cb::chi_sweep_max_deviation(1000, opt.seed);
  j["chi_sweep_max_relative_deviation"] = chi;
  std::cout << "chi brute-vs-closed max relative deviation: " << chi << "\n";

  cb::QuadConfig q;
  q.rel_tol = 1e-9;
  const double m = 1.0, eps = 1e-3;
  const cb::Table ks = cb::k_sensitivity_table(m, eps, {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}, q);
  ordered_json conv = ordered_json::object();
  for (const auto& [k, v] : cb::convention_record(cb::RateOptions{})) conv[k] = v;
  j["convention"] = conv;
  j["k_sensitivity"] = {{"m", m}, {"eps", eps}, {"columns", ks.columns}, {"rows", ks.rows}};

  fs::create_directories(out_dir);
  {
    std::ofstream o(fs::path(out_dir) / "diagnostics.json", std::ios::binary);
    o << j.dump(2) << "\n";
  }
  {
    std::ofstream o(fs::path(out_dir) / "k_sensitivity.csv", std::ios::binary);
    o << "# config_hash=" << hash << " seed=" << opt.seed << " eps=" << eps << " m=" << m
      << " Lambda=5m,10m,20m normalization=theorem\n";
    for (size_t c = 0; c < ks.columns.size(); ++c)
      o << (c ? "," : "") << ks.columns[c] << "{eps=" << eps << ";m=" << m << "}";
    o << "\n";
    for (const auto& row : ks.rows) {
      for (size_t c = 0; c < row.size(); ++c) o << (c ? "," : "") << csv_number(row[c]);
      o << "\n";
    }
  }
  std::cout << "K(rho) cutoff sensitivity (Lambda = 5m, 10m, 20m):\n";
  for (const auto& row : ks.rows)
    std::cout << "  rho=" << row[0] << "  K=" << row[1] << ", " << row[2] << ", " << row[3]
              << "  spread=" << row[4] << "\n";
  std::cout << "  wrote " << (fs::path(out_dir) / "diagnostics.json").string() << "\n  wrote "
            << (fs::path(out_dir) / "k_sensitivity.csv").string() << "\n";
  return all ? 0 : kExitDiagnostics;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order rate computations on conformally flat backgrounds"};
  app.require_subcommand(1);
  Flags f;
  auto* run = app.add_subcommand("run", "evaluate one configuration");
  add_common(run, f, true);
  auto* diag = app.add_subcommand("diagnostics", "run the invariant and acceptance suites");
  add_common(diag, f, false);
  diag->add_option("--only", f.only, "criterion ids to run (default: all)")
      ->check(CLI::Range(1, cb::kCriteriaCount));
  auto* sw = app.add_subcommand("sweep", "evaluate over the configured t or Lambda range");
  add_common(sw, f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return report_outcome(cb::run(cb::load_config(f.config, overrides(f))));
    if (*sw) return report_outcome(cb::sweep(cb::load_config(f.config, overrides(f))));
    if (*diag) return run_diagnostics(f);
  } catch (const cb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cb::DomainError& e) {
    std::cerr << "invalid request: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
