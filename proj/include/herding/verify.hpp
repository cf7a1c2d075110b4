#pragma once

#include "herding/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace herding::verify {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t trials = 0;
  double worst = 0.0;  // worst-case residual, in the check's own measure
  double threshold = 0.0;
  std::vector<std::string> notes;
};

inline constexpr std::size_t kJacobianTrials = 100;
inline constexpr std::size_t kSontagTrials = 1000;
inline constexpr std::size_t kQpTrials = 500;
inline constexpr std::size_t kInvarianceTrials = 20;

/// Analytic field Jacobians against central differences (step 1e-6). In paper_literal mode the
/// herder Jacobian discrepancy is reported as a note instead of failing the check.
CheckResult check_jacobian(std::size_t trials, std::uint64_t seed, JacobianMode mode = JacobianMode::ExactPerHerder);

/// a + b.u_nom >= -1e-9 for random goal terms.
CheckResult check_sontag(std::size_t trials, std::uint64_t seed);

/// Planar QP against a dense grid projection over [-2, 2]^2 at resolution 1e-3.
CheckResult check_qp(std::size_t trials, std::uint64_t seed);

/// Short closed-loop runs from states with every h2_full >= 0; min h2_full must stay >= -1e-3.
CheckResult check_invariance(std::size_t trials, std::uint64_t seed);

}  // namespace herding::verify
