#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "confbaryo/baryo_rate.hpp"

namespace cb {

constexpr int kCriteriaCount = 13;

struct DiagnosticsOptions {
  uint64_t seed = 20240611;
  int threads = 1;
};

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool pass = false;
  double measured = 0.0;   // headline quantity compared against threshold
  double threshold = 0.0;
  std::string detail;      // secondary measurements, key=value pairs
  double seconds = 0.0;
};

// Runs one acceptance criterion (1..13). Throws DomainError for other ids.
CheckResult run_criterion(int id, const DiagnosticsOptions& opt = {});
std::vector<CheckResult> run_all(const DiagnosticsOptions& opt = {});

// "PASS [id] name measured=... threshold=... time=...s detail"
std::string format_check(const CheckResult& r);

// Largest relative deviation of the brute-force trace from the closed form
// over n random points (both vertex variants).
double chi_sweep_max_deviation(int n, uint64_t seed);

// K(rho) at fixed rho for Lambda in {5m, 10m, 20m}: columns rho, K per
// Lambda, and the relative spread across the three cutoffs.
Table k_sensitivity_table(double m, double eps, const std::vector<double>& rhos, const QuadConfig& quad);

}  // namespace cb
