#pragma once

#include <functional>
#include <string>
#include <vector>

namespace aquaaug {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant and gradient suite over nnref plus the image-level laws
/// (kernels, flip, letterbox, normalize).
std::vector<CheckResult> run_selfcheck();

std::string format_check_table(const std::vector<CheckResult>& results);

}  // namespace aquaaug
