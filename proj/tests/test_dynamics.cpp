#include "conset/dynamics.hpp"
#include "conset/error.hpp"
#include "conset/linalg.hpp"
#include "conset/spectrum.hpp"
#include "systems.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace conset;
using namespace conset::testing;

TEST_CASE("flow of a diagonal system matches the closed form") {
  const auto sys = quadrant_system();
  const ControlSignal u({{0.5, vec2(1, -1)}, {1.0, vec2(-0.5, 0.25)}});
  const Vector x0 = vec2(2.0, -3.0);
  const FlowPoint p = flow(sys, x0, u, 1.5);
  CHECK(std::abs(p.x[0] - 2.0 * std::exp(0.5 - 0.5)) < 1e-14);
  CHECK(std::abs(p.x[1] + 3.0 * std::exp(-0.5 + 0.25)) < 1e-14);
  CHECK(std::abs(p.logRadius - std::log(p.x.norm())) < 1e-13);
  // Past the end of u the last value is held.
  const FlowPoint q = flow(sys, x0, u, 3.5);
  CHECK(std::abs(q.x[0] - 2.0 * std::exp(-1.0)) < 1e-14);
}

TEST_CASE("affine flow converges to the equilibrium") {
  const auto sys = damped_affine(1.2, 0.0);
  const Vector xeq = -eval_A(sys, scalar(1.0)).inverse() * sys.C() * scalar(1.0);
  const FlowPoint p = flow(sys, vec2(3, 3), ControlSignal::constant(scalar(1.0), 1.0), 60.0);
  CHECK((p.x - xeq).norm() < 1e-9);
  CHECK(std::isnan(p.logRadius));
}

TEST_CASE("zero initial state stays at zero") {
  const auto pts =
      sample_trajectory(damped_oscillator(), Vector::Zero(2), ControlSignal::constant(scalar(0.3), 1.0), 1.0, 0.25);
  REQUIRE(pts.size() == 5);
  for (const auto& p : pts) CHECK(p.x.norm() == 0.0);
  CHECK(std::isinf(pts.back().logRadius));
}

TEST_CASE("kernel direction is a fixed point") {
  const auto pts =
      sample_trajectory(damped_oscillator(), vec2(1, 0), ControlSignal::constant(scalar(-1.0), 2.0), 2.0, 0.5);
  for (const auto& p : pts) CHECK((p.x - vec2(1, 0)).norm() < 1e-14);
}

TEST_CASE("flow errors") {
  const auto sys = damped_oscillator();
  CHECK_THROWS_AS(flow(sys, vec2(1, 0), ControlSignal{}, 1.0), Error);
  CHECK_THROWS_AS(flow(sys, vec2(NAN, 0), ControlSignal::constant(scalar(0), 1.0), 1.0), Error);
  CHECK_THROWS_AS(sphere_field(damped_affine(), SphereState(vec2(1, 0)), scalar(0)), Error);
  CHECK_THROWS_AS(SphereState(Vector::Zero(2)), Error);
}

TEST_CASE("homogeneity of the flow over seeded samples") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1.2, 1.2), Alpha(0.01, 100.0), Dur(0.05, 1.0);
  const auto sys = damped_oscillator();
  for (int i = 0; i < 100; ++i) {
    std::vector<Segment> segs;
    for (int k = 0; k < 3; ++k) segs.push_back({Dur(rng), scalar(U(rng))});
    const ControlSignal u(segs);
    const Vector x = random_vector(rng, 2);
    const double alpha = Alpha(rng);
    const double t = u.total_duration();
    const Vector lhs = flow(sys, alpha * x, u, t).x;
    const Vector rhs = alpha * flow(sys, x, u, t).x;
    CHECK((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("sphere flow is the normalized flow") {
  const auto sys = damped_oscillator();
  const ControlSignal u({{0.7, scalar(1.2)}, {1.3, scalar(-0.4)}});
  const SphereState s0(vec2(0.3, 0.8));
  const SphereState s = sphere_flow(sys, s0, u, 2.0);
  const Vector x = flow(sys, s0.vec(), u, 2.0).x;
  CHECK((s.vec() - x.normalized()).norm() < 1e-13);
  CHECK(std::abs(s.vec().norm() - 1.0) < 1e-15);
  // Tangency of the projected field.
  CHECK(std::abs(sphere_field(sys, s0, scalar(0.5)).dot(s0.vec())) < 1e-15);
}

TEST_CASE("lyapunov exponent of an eigen-direction") {
  const auto sys = damped_oscillator();
  // A(0) has eigenvalue (−3 + √5)/2 with eigenvector (1, λ).
  const double lam = (-3.0 + std::sqrt(5.0)) / 2.0;
  const double e = lyapunov_exponent(sys, vec2(1, lam), ControlSignal::constant(scalar(0), 1.0), 10.0);
  CHECK(std::abs(e - lam) < 1e-12);
}

TEST_CASE("trajectory csv") {
  const auto pts = sample_trajectory(quadrant_system(), vec2(1, 1), ControlSignal::constant(vec2(0, 0), 1), 1.0, 0.5);
  std::ostringstream os;
  write_trajectory_csv(os, pts);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,x1,x2,logr\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("projected field values") {
  const auto sys = damped_oscillator();
  const Vector h = sphere_field(sys, SphereState(vec2(1, 0)), scalar(0));
  CHECK((h - vec2(0, -1)).norm() < 1e-15);
  const SphereState s(vec2(0.6, -0.8));
  CHECK((sphere_field(sys, -s, scalar(0.4)) + sphere_field(sys, s, scalar(0.4))).norm() < 1e-15);
  // Upper semicircle of the shear system drifts toward (1, 0) under u = 0.
  const SphereState end = sphere_flow(shear_system(), SphereState(vec2(0, 1)), ControlSignal::constant(scalar(0), 1), 1e4);
  CHECK((end.vec() - vec2(1, 0)).norm() < 1e-3);
}
