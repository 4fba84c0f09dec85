// Acceptance suite: one PASS/FAIL line per criterion at full sample sizes.
// `acceptance --fast` runs the reduced sizes; extra numeric arguments pick criteria.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "vipr/parallel.hpp"
#include "vipr/validation.hpp"

int main(int argc, char** argv) {
  vipr::CheckOptions opts;
  opts.level = vipr::CheckLevel::kFull;
  opts.threads = vipr::default_threads();
  opts.log = &std::cerr;
  std::vector<int> criteria;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--fast") {
      opts.level = vipr::CheckLevel::kFast;
    } else {
      criteria.push_back(std::atoi(arg.c_str()));
    }
  }
  bool all = true;
  for (const auto& r : vipr::run_checks(opts, criteria)) {
    std::cout << vipr::format_check_line(r) << std::endl;
    all = all && r.passed;
  }
  return all ? 0 : 1;
}
