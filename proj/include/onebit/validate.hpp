// SPDX-License-Identifier: Apache-2.0

#ifndef ONEBIT_VALIDATE_HPP
#define ONEBIT_VALIDATE_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace onebit {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  /// Compare the orthant kernel against a deliberately wrong closed-form constant.
  bool inject_orthant_fault = false;
};

/// Fast invariant suite on tiny instances: Toeplitz structure, quantizer, pilots,
/// model equivalence, FI equality at M = 1, orthant closed forms, mean gradient.
std::vector<CheckResult> run_validation(const ValidationOptions& options = {});

/// One `PASS name detail` / `FAIL name detail` line per check; returns true iff all passed.
bool print_validation(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace onebit

#endif
