#pragma once

#include <Eigen/Dense>

#include <variant>
#include <vector>

namespace conset {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class SystemKind { HomogeneousBilinear, InhomogeneousBilinear, Affine };

const char* to_string(SystemKind kind);

/// Admissible control values Ω ⊂ ℝ^m: a box (an interval when m = 1) or a
/// finite set of points.
class ControlRange {
 public:
  struct Box {
    Vector lower;
    Vector upper;
  };
  struct FiniteSet {
    std::vector<Vector> points;
  };

  static ControlRange box(Vector lower, Vector upper);
  static ControlRange interval(double lower, double upper);
  static ControlRange finite_set(std::vector<Vector> points);
  /// The trivial range for systems without inputs (m = 0).
  static ControlRange none();

  int dim() const;
  bool is_box() const { return std::holds_alternative<Box>(range_); }
  bool is_interval() const { return is_box() && dim() == 1; }
  const Box& as_box() const;
  const FiniteSet& as_set() const;

  /// Exact membership, no tolerance.
  bool contains(const Vector& u) const;

  /// Ω − offset.
  ControlRange shifted(const Vector& offset) const;

  /// Box: vertices and midpoints (3^m points, lexicographic). Set: its points.
  std::vector<Vector> grid_sample() const;

  bool operator==(const ControlRange& other) const;

 private:
  explicit ControlRange(std::variant<Box, FiniteSet> range) : range_(std::move(range)) {}

  std::variant<Box, FiniteSet> range_;
};

/// ẋ = A x + Σ u_i (B_i x + c_i) + d with u ∈ Ω.
class AffineSystem {
 public:
  AffineSystem(Matrix A, std::vector<Matrix> B, Matrix C, Vector d, ControlRange omega);

  static AffineSystem homogeneous(Matrix A, std::vector<Matrix> B, ControlRange omega);

  int dim() const { return static_cast<int>(A_.rows()); }
  int inputs() const { return static_cast<int>(B_.size()); }

  const Matrix& A() const { return A_; }
  const std::vector<Matrix>& B() const { return B_; }
  const Matrix& C() const { return C_; }
  const Vector& d() const { return d_; }
  const ControlRange& omega() const { return omega_; }

  SystemKind kind() const;
  bool is_homogeneous() const { return kind() == SystemKind::HomogeneousBilinear; }

  bool operator==(const AffineSystem& other) const;

 private:
  Matrix A_;
  std::vector<Matrix> B_;
  Matrix C_;
  Vector d_;
  ControlRange omega_;
};

/// A(u) = A + Σ u_i B_i.
Matrix eval_A(const AffineSystem& sys, const Vector& u);

/// A(u) x + C u + d.
Vector eval_rhs(const AffineSystem& sys, const Vector& x, const Vector& u);

/// Negates A, every B_i, C and d; Ω is kept.
AffineSystem time_reverse(const AffineSystem& sys);

/// Moves the drift to A(u0) when C u0 + d = 0 (residual gate 1e-12). The
/// result has d = 0 and control range Ω − u0.
AffineSystem homogenize_shift(const AffineSystem& sys, const Vector& u0);

struct Segment {
  double duration;
  Vector value;

  bool operator==(const Segment& other) const;
};

/// Piecewise-constant control. Stored canonically: zero-length segments are
/// dropped and adjacent segments with equal values merged. A flow evaluated
/// past the total duration holds the final value.
class ControlSignal {
 public:
  ControlSignal() = default;
  explicit ControlSignal(std::vector<Segment> segments);

  static ControlSignal constant(Vector value, double duration);

  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  double total_duration() const;
  int dim() const;

  /// Concatenation (this first, then other).
  ControlSignal then(const ControlSignal& other) const;
  /// The tail u(t + ·). Past the end this is the held final value; its
  /// duration is immaterial under the hold semantics and is set to 1.
  ControlSignal shifted(double t) const;
  /// v(τ) = u(T − τ) on [0, T].
  ControlSignal reversed() const;
  ControlSignal repeated(int times) const;
  Vector value_at(double t) const;

  /// Throws InvalidInput unless every value lies in omega.
  void validate(const ControlRange& omega) const;

  bool operator==(const ControlSignal& other) const { return segments_ == other.segments_; }

 private:
  std::vector<Segment> segments_;
};

}  // namespace conset
