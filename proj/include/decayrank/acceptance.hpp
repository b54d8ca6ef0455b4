#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "decayrank/analytics.hpp"

namespace decayrank {

enum class VerifyBudget { quick, full };

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool passed = false;
  double residual = 0.0;   // worst observed deviation (units depend on the check)
  double tolerance = 0.0;  // threshold the residual is compared against
  std::string detail;
  double seconds = 0.0;
};

using CheckCallback = std::function<void(const CheckResult&)>;

/// Runs every acceptance criterion. `quick` shrinks Monte Carlo path counts
/// and stream lengths by roughly 10x; `full` uses the stated budgets.
/// Results arrive through `on_result` as each check finishes.
std::vector<CheckResult> run_acceptance(VerifyBudget budget, const CheckCallback& on_result = {});

/// Covariance closed form under test: returns the row-major n x n matrix.
using CovarianceClosedForm = std::function<std::vector<double>(double alpha, std::span<const double> q, Horizon t)>;

/// The n = 3 exact-enumeration covariance check, with the closed form
/// injectable so a deliberately broken formula can be shown to fail.
CheckResult check_covariance_enumeration(const CovarianceClosedForm& closed_form);

}  // namespace decayrank
