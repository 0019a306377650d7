// Acceptance runner: one PASS/FAIL line per criterion. Optional arguments
// select criterion ids; --seed N and --threads N override the defaults.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "confbaryo/diagnostics.hpp"

int main(int argc, char** argv) {
  cb::DiagnosticsOptions opt;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc) {
      opt.seed = std::stoull(argv[++i]);
    } else if (a == "--threads" && i + 1 < argc) {
      opt.threads = std::stoi(argv[++i]);
    } else {
      ids.push_back(std::stoi(a));
    }
  }
  if (ids.empty())
    for (int id = 1; id <= cb::kCriteriaCount; ++id) ids.push_back(id);
  int failed = 0;
  for (int id : ids) {
    cb::CheckResult r;
    try {
      r = cb::run_criterion(id, opt);
    } catch (const std::exception& e) {
      r.criterion = id;
      r.name = "criterion " + std::to_string(id);
      r.detail = std::string("exception: ") + e.what();
    }
    std::cout << cb::format_check(r) << std::endl;
    if (!r.pass) ++failed;
  }
  std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
