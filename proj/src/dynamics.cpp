#include "conset/dynamics.hpp"

#include "conset/error.hpp"
#include "conset/linalg.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace conset {

namespace {

constexpr double kMaxStepNorm = 4.0;

struct State {
  bool homogeneous;
  Vector x;    // non-homogeneous state
  Vector dir;  // homogeneous direction, unit length
  double logr; // homogeneous log radius
};

int substeps(const Matrix& Av, double dt) {
  const double size = norm1(Av) * dt;
  return size <= kMaxStepNorm ? 1 : static_cast<int>(std::ceil(size / kMaxStepNorm));
}

void advance(const AffineSystem& sys, State& st, const Vector& v, double dt) {
  if (dt <= 0.0) return;
  const Matrix Av = eval_A(sys, v);
  const int k = substeps(Av, dt);
  const double h = dt / k;
  if (st.homogeneous) {
    const Matrix E = expm(Av * h);
    for (int i = 0; i < k; ++i) {
      Vector y = E * st.dir;
      const double r = y.norm();
      if (!(r >= 1e-300) || !std::isfinite(r)) fail(ErrorKind::NumericalFailure, "flow collapsed or overflowed");
      st.dir = y / r;
      st.logr += std::log(r);
    }
  } else {
    const AffineStep step = affine_step(Av, sys.C() * v + sys.d(), h);
    for (int i = 0; i < k; ++i) st.x = step.E * st.x + step.w;
    if (!st.x.allFinite()) fail(ErrorKind::NumericalFailure, "flow produced non-finite state");
  }
}

State integrate(const AffineSystem& sys, const Vector& x0, const ControlSignal& u, double t) {
  if (x0.size() != sys.dim()) fail(ErrorKind::InvalidInput, "initial state length differs from n");
  if (!x0.allFinite()) fail(ErrorKind::NumericalFailure, "initial state has non-finite entries");
  if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorKind::InvalidInput, "flow time must be finite and nonnegative");
  if (u.dim() != sys.inputs() && !u.empty()) fail(ErrorKind::InvalidInput, "control length differs from m");
  State st{sys.is_homogeneous(), x0, Vector(), 0.0};
  if (st.homogeneous) {
    const double r = x0.norm();
    if (r == 0.0) {
      st.dir = Vector::Zero(x0.size());
      st.logr = -std::numeric_limits<double>::infinity();
      return st;
    }
    st.dir = x0 / r;
    st.logr = std::log(r);
  }
  if (t == 0.0) return st;
  if (u.empty()) {
    if (sys.inputs() != 0) fail(ErrorKind::InvalidInput, "empty control signal");
    advance(sys, st, Vector(0), t);
    return st;
  }
  double remaining = t;
  const auto& segs = u.segments();
  for (std::size_t i = 0; i < segs.size() && remaining > 0.0; ++i) {
    const bool last = i + 1 == segs.size();
    const double dt = last ? remaining : std::min(segs[i].duration, remaining);
    advance(sys, st, segs[i].value, dt);
    remaining -= dt;
  }
  return st;
}

}  // namespace

SphereState::SphereState(const Vector& s) {
  const double r = s.norm();
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::InvalidInput, "sphere state needs a finite nonzero vector");
  s_ = s / r;
}

SphereState SphereState::from_angle(double theta) {
  Vector s(2);
  s << std::cos(theta), std::sin(theta);
  return SphereState(s);
}

double SphereState::angle() const {
  if (s_.size() != 2) fail(ErrorKind::InvalidInput, "angle() needs a circle state");
  return std::atan2(s_[1], s_[0]);
}

FlowPoint flow(const AffineSystem& sys, const Vector& x0, const ControlSignal& u, double t) {
  const State st = integrate(sys, x0, u, t);
  if (!st.homogeneous) return {t, st.x, std::numeric_limits<double>::quiet_NaN()};
  if (std::isinf(st.logr) && st.logr < 0) return {t, Vector::Zero(x0.size()), st.logr};
  Vector x = std::exp(st.logr) * st.dir;
  if (!x.allFinite()) fail(ErrorKind::NumericalFailure, "flow state overflowed");
  return {t, std::move(x), st.logr};
}

Vector sphere_field(const AffineSystem& sys, const SphereState& s, const Vector& u) {
  if (!sys.is_homogeneous()) fail(ErrorKind::InvalidInput, "sphere_field needs a homogeneous bilinear system");
  if (s.dim() != sys.dim()) fail(ErrorKind::InvalidInput, "sphere state length differs from n");
  const Vector As = eval_A(sys, u) * s.vec();
  return As - s.vec().dot(As) * s.vec();
}

SphereState sphere_flow(const AffineSystem& sys, const SphereState& s0, const ControlSignal& u, double t) {
  if (!sys.is_homogeneous()) fail(ErrorKind::InvalidInput, "sphere_flow needs a homogeneous bilinear system");
  return SphereState(integrate(sys, s0.vec(), u, t).dir);
}

std::vector<FlowPoint> sample_trajectory(const AffineSystem& sys, const Vector& x0, const ControlSignal& u,
                                         double horizon, double dt, bool sphere) {
  if (!(dt > 0.0) || !(horizon >= 0.0)) fail(ErrorKind::InvalidInput, "need dt > 0 and horizon >= 0");
  if (sphere && !sys.is_homogeneous()) fail(ErrorKind::InvalidInput, "--sphere needs a homogeneous bilinear system");
  std::vector<FlowPoint> out;
  const auto steps = static_cast<long>(std::floor(horizon / dt * (1.0 + 1e-12)));
  for (long i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    if (sphere) {
      const State st = integrate(sys, x0, u, t);
      out.push_back({t, st.dir, st.logr});
    } else {
      out.push_back(flow(sys, x0, u, t));
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<FlowPoint>& points) {
  const auto n = points.empty() ? 0 : points.front().x.size();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << (i + 1);
  os << ",logr\n";
  const auto old = os.precision(17);
  for (const auto& p : points) {
    os << p.t;
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << p.x[i];
    os << ',' << p.logRadius << '\n';
  }
  os.precision(old);
}

}  // namespace conset
