#pragma once

#include "conset/diophantine.hpp"
#include "conset/reachability.hpp"
#include "conset/spectrum.hpp"

#include <optional>
#include <string>

namespace conset {

enum class LiftVerdict { ConeControlSet, NotAControlSet, Undecided };

const char* to_string(LiftVerdict v);

struct LiftResult {
  LiftVerdict verdict = LiftVerdict::Undecided;
  /// The cone over the circle set; present for ConeControlSet.
  std::optional<ControlSetResult> cone;
  std::string note;
};

/// Cone {αs : α > 0, s ∈ cs} when 0 lies inside the spectral estimate and a
/// certified scaling pair exists in interior cells.
LiftResult lift_cone(const AffineSystem& sys, const ControlSetResult& cs, const std::optional<SpectralEstimate>& spectral);

struct ReachDemo {
  std::int64_t k = 0;
  std::int64_t ell = 0;
  double achievedRadius = 0.0;
};

/// (k, ℓ) with |β₃β₂β₁(α⁺)^k(α⁻)^ℓ − α₁| < eps.
ReachDemo diophantine_reach_demo(const ConeLiftCertificate& cert, const Vector& beta, double alpha1, double eps,
                                 std::int64_t maxEll = 100000);

}  // namespace conset
