#pragma once

#include <string>
#include <vector>

namespace helmvp {

struct SelftestModule {
  std::string name;
  int passed = 0;
  int failed = 0;
  std::vector<std::string> failures;
};

/// Quick invariant checks of specfun, basis, quadrature and potential that
/// need no external reference values.
std::vector<SelftestModule> run_selftest(unsigned threads = 0);

}  // namespace helmvp
