#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace siegel {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct SelftestResult {
  std::vector<SelftestCheck> checks;
  bool ok() const;
};

// Runs the invariant suite, printing one line per check to log when given.
// quick shrinks the exhaustive ranges for use inside unit tests.
SelftestResult run_selftest(std::ostream* log, bool quick = false);

}  // namespace siegel
