#pragma once

#include "conset/reachability.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace conset {

/// (log‖φ(h, x0, u)‖ − log‖x0‖) / h with u repeated periodically.
double lyapunov_exponent(const AffineSystem& sys, const Vector& x0, const ControlSignal& u, double horizon);

struct SpectralSample {
  ControlSignal control;
  Vector point;
  double exponent = 0.0;
  double period = 0.0;
  int cell = -1;
  bool constantControl = false;
};

enum class TriState { Yes, No, Boundary };

const char* to_string(TriState t);

struct SpectralEstimate {
  int setRef = 0;
  Manifold manifold = Manifold::Circle;
  /// Inner estimate: [min, max] of the sample exponents.
  double lo = 0.0;
  double hi = 0.0;
  std::vector<SpectralSample> samples;
  TriState containsZeroInterior = TriState::Boundary;
};

struct SpectralBudget {
  int attempts = 2000;
  std::uint64_t seed = 1;
  double maxReturnTime = 20.0;
};

/// Samples exponents from constant-control eigen-directions in the set and
/// from two-segment periodic controls returning exactly to their start point
/// (return time found by bisection). Attempt i draws from its own seeded
/// stream; a larger budget keeps every sample of a smaller one.
SpectralEstimate floquet_spectrum_estimate(const AffineSystem& sys, const TransitionGraph& g,
                                           const ControlSetResult& cs, const SpectralBudget& budget);

/// Deterministic control sequence: the 3^m grid of Ω, then Halton points (box)
/// or the set points (finite set; the sequence then ends).
std::vector<Vector> control_sequence(const ControlRange& omega, int count);

struct GlobalExponents {
  double kappaStar = 0.0;
  double kappa = 0.0;
  std::string method;
};

/// Inner estimates of κ* and κ from eigenvalues of A(u) over the control
/// samples and from monodromy exponents of random two-segment periodic
/// controls.
GlobalExponents global_exponents(const AffineSystem& sys, const std::vector<Vector>& controlSamples,
                                 int periodicSamples = 200, std::uint64_t seed = 1);

enum class Verdict { Controllable, NotControllable, Undecided };

const char* to_string(Verdict v);

struct ControllabilityVerdict {
  Verdict verdict = Verdict::Undecided;
  std::string reason;
};

/// Sphere sets, when given, also decide: a controllable system projects to a
/// controllable system on the sphere.
ControllabilityVerdict controllability_verdict(const std::vector<ControlSetResult>& projectiveSets,
                                               const CellGrid& projectiveGrid, const GlobalExponents& ge,
                                               const std::vector<ControlSetResult>* sphereSets = nullptr,
                                               const CellGrid* sphereGrid = nullptr);

}  // namespace conset
