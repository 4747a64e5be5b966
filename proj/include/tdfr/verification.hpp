#pragma once

// Release-gate acceptance criteria, shared by `tdfr verify` and the
// acceptance test binary. Each criterion reports its measured figure next to
// the pinned threshold and its wall time next to the pinned time budget.

#include <string>
#include <vector>

#include "tdfr/spacetime.hpp"

namespace tdfr {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  double seconds = 0.0;
  double time_limit = 0.0;  // 0: no budget
  std::string detail;
};

struct VerifyOptions {
  // Replaces dilation_factor in the worldline-driven criteria (fault injection).
  DilationLaw dilation_law;
};

CriterionResult check_dilated_jarzynski(const VerifyOptions& opts = {});
CriterionResult check_oscillator_closed_form(const VerifyOptions& opts = {});
CriterionResult check_generalized_jarzynski(const VerifyOptions& opts = {});
CriterionResult check_second_law(const VerifyOptions& opts = {});
CriterionResult check_comoving_null(const VerifyOptions& opts = {});
CriterionResult check_newtonian_limit(const VerifyOptions& opts = {});
CriterionResult check_potential_difference(const VerifyOptions& opts = {});
CriterionResult check_appendix_convergence(const VerifyOptions& opts = {});
CriterionResult check_monte_carlo(const VerifyOptions& opts = {});

std::vector<CriterionResult> run_acceptance_suite(const VerifyOptions& opts = {});

/// One line: "[PASS] 1 name: detail (0.12 s / 5 s)".
std::string format_result(const CriterionResult& r);

}  // namespace tdfr
