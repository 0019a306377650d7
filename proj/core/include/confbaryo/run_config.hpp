#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "confbaryo/baryo_rate.hpp"

namespace cb {

// Raised for invalid configurations; the driver maps it to exit status 2.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct SweepSpec {
  std::string variable = "t";  // "t" or "Lambda"
  double from = 0.0;
  double to = 0.0;
  int points = 0;
  std::vector<double> values() const;
};

struct ConfigOverrides {
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> tolerance;  // quadrature rel_tol
  std::optional<std::string> out_dir;
};

struct BumpParams {
  double A = 0.0, w = 1.0, t0 = 0.0;
  Vec3 center = Vec3::Zero();
};

struct RunConfig {
  RateRequest request;
  std::string generic_G = "scenario1";  // generic scenario only
  std::optional<BumpParams> bump;  // set for gaussian_bump profiles
  std::optional<SweepSpec> sweep;
  std::string out_dir = "out";
  std::string canonical;  // normalized config (threads and output dir excluded)
  std::string hash;       // FNV-1a of `canonical`, 16 hex digits
};

// Parses and validates a JSON configuration. `base_dir` resolves relative
// file references (radial profile tables). Throws ConfigError.
RunConfig parse_config(const std::string& text, const ConfigOverrides& ov = {}, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path, const ConfigOverrides& ov = {});

std::string fnv1a_hex(const std::string& s);

// Builds the request for one evaluation (applies the G selector for generic runs).
RateReport evaluate(const RunConfig& cfg);

// Report body as pretty JSON with a fixed field order and no timestamps.
std::string report_json(const RateReport& rep, const RunConfig& cfg);
// CSV with a leading comment line (hash, seed, cutoffs, conventions) and a
// header row whose names carry units and the cutoff annotation.
std::string table_csv(const Table& table, const RateReport& rep, const RunConfig& cfg);

struct RunOutcome {
  int exit_code = 0;
  std::vector<std::string> files;
  std::string message;
};

// Exit codes: 0 ok, 3 numerical non-convergence (outputs written and flagged).
RunOutcome run(const RunConfig& cfg);
// Requires cfg.sweep; exit 2 for an empty range.
RunOutcome sweep(const RunConfig& cfg);

}  // namespace cb
