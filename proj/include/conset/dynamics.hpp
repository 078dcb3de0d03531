#pragma once

#include "conset/model.hpp"

#include <iosfwd>
#include <vector>

namespace conset {

struct FlowPoint {
  double t = 0.0;
  Vector x;
  /// log‖x(t)‖ for homogeneous systems, NaN otherwise.
  double logRadius = 0.0;
};

/// A point on the unit sphere, normalized on construction.
class SphereState {
 public:
  explicit SphereState(const Vector& s);
  static SphereState from_angle(double theta);

  const Vector& vec() const { return s_; }
  int dim() const { return static_cast<int>(s_.size()); }
  /// atan2 angle in (−π, π]; circle states only.
  double angle() const;
  SphereState operator-() const { return SphereState(-s_); }

 private:
  Vector s_;
};

/// φ(t, x0, u). Segments are integrated with exact exponentials; past the end
/// of u the final value is held.
FlowPoint flow(const AffineSystem& sys, const Vector& x0, const ControlSignal& u, double t);

/// A(u)s − (sᵀA(u)s)s. Homogeneous bilinear systems only.
Vector sphere_field(const AffineSystem& sys, const SphereState& s, const Vector& u);

/// π(φ(t, s0, u)), renormalized after every exponential step.
SphereState sphere_flow(const AffineSystem& sys, const SphereState& s0, const ControlSignal& u, double t);

/// Flow samples at t = 0, dt, 2dt, ... up to horizon (inclusive when it lands
/// on the grid). With sphere = true the states are projected to the sphere.
std::vector<FlowPoint> sample_trajectory(const AffineSystem& sys, const Vector& x0, const ControlSignal& u,
                                         double horizon, double dt, bool sphere = false);

/// CSV with header t,x1,...,xn,logr.
void write_trajectory_csv(std::ostream& os, const std::vector<FlowPoint>& points);

}  // namespace conset
