#pragma once

#include "conset/reachability.hpp"

#include <optional>
#include <string>
#include <vector>

namespace conset {

enum class EquilibriumKind { Unique, AffineSubspace, NoSolution };

const char* to_string(EquilibriumKind k);

struct EquilibriumPoint {
  Vector u;
  Vector x;
  double detA = 0.0;
  EquilibriumKind kind = EquilibriumKind::Unique;
  /// Orthonormal basis of ker A(u) for AffineSubspace and NoSolution.
  Matrix kernel;
  double residual = 0.0;
};

/// x_u = −A(u)⁻¹(Cu + d) when A(u) is numerically regular, otherwise the
/// least-squares classification.
EquilibriumPoint solve_equilibrium(const AffineSystem& sys, const Vector& u, bool allowOutside = false);

struct KalmanRecord {
  Vector u;
  Matrix Bprime;
  int rank = 0;
  bool marginal = false;
  /// Evaluated at the particular solution of an affine equilibrium subspace.
  bool particular = false;
};

/// B′(u) = C + [B₁x, …, B_m x].
Matrix b_prime(const AffineSystem& sys, const Vector& x);

KalmanRecord kalman_rank(const AffineSystem& sys, const Vector& u, bool allowOutside = false);

enum class StabilityType { Stable, TotallyUnstable, Hyperbolic, Marginal, Varying };

const char* to_string(StabilityType t);

struct EigenCounts {
  int negRe = 0;
  int posRe = 0;
  int marginal = 0;

  bool operator==(const EigenCounts& o) const { return negRe == o.negRe && posRe == o.posRe && marginal == o.marginal; }
};

EigenCounts eigen_counts(const Matrix& M, double margin = 1e-8);

struct UnboundedCertificate {
  double uSingular = 0.0;
  /// Unit vector x_u/‖x_u‖ at the last approach step.
  Vector direction;
  double normReached = 0.0;
  double angleToKernel = 0.0;
  bool zeroEigenvalue = false;
  bool outsideRange = false;
  bool certified = false;
};

/// Straight path u(s) = start + s (end − start), s ∈ [0, 1]. For m = 1 the
/// branch parameters are reported in u itself.
struct ControlPath {
  Vector start;
  Vector end;

  Vector at(double s) const { return start + s * (end - start); }
};

struct EquilibriumBranch {
  double sLo = 0.0;
  double sHi = 0.0;
  bool loSingular = false;
  bool hiSingular = false;
  std::vector<EquilibriumPoint> points;
  std::vector<double> singularEndpoints;
  StabilityType stabilityType = StabilityType::Varying;
  EigenCounts counts;
  std::vector<KalmanRecord> kalman;
  bool kalmanAllOk = false;
  std::vector<UnboundedCertificate> unbounded;
  std::vector<std::string> continuityFlags;
};

struct BranchTrace {
  ControlPath path;
  bool scalar = true;
  std::vector<double> roots;
  std::vector<double> suspectedTangencies;
  std::vector<EquilibriumBranch> branches;
};

/// Roots of det A(u(s)) by sign change and bisection to width 1e-12, then the
/// branches between consecutive roots sampled on the grid. Continuation may
/// leave Ω.
BranchTrace trace_branches(const AffineSystem& sys, const ControlPath& path, int gridPoints);
BranchTrace trace_branches(const AffineSystem& sys, double uLo, double uHi, int gridPoints);

/// Walks toward a singular control from inside a branch until ‖x_u‖ ≥ 10⁶ and
/// the direction is within 1e-6 of ker A(u⁰).
UnboundedCertificate certify_unbounded(const AffineSystem& sys, const ControlPath& path, double sSingular,
                                       double sInside);

struct RankScan {
  std::vector<double> failing;
  std::vector<std::pair<double, double>> clusters;
  std::vector<double> undefined;
};

RankScan rank_scan(const AffineSystem& sys, const std::vector<double>& uGrid);

struct SketchOptions {
  Vector lower;
  Vector upper;
  int cellsPerAxis = 60;
  double tau = 0.2;
};

struct AroundVerdict {
  bool containsControlSet = false;
  bool undecided = true;
  bool unbounded = false;
  std::vector<UnboundedCertificate> certificates;
  bool globalReachMinus = false;
  bool globalReachPlus = false;
  bool uniformlyHyperbolic = false;
  std::vector<std::string> notes;
  std::vector<ControlSetResult> sketch;
};

AroundVerdict control_set_around(const AffineSystem& sys, const EquilibriumBranch& branch,
                                 const std::optional<SketchOptions>& sketch = std::nullopt);

}  // namespace conset
