#include "conset/dynamics.hpp"
#include "conset/equilibria.hpp"
#include "conset/error.hpp"
#include "systems.hpp"

#include <catch_amalgamated.hpp>
#include <unsupported/Eigen/MatrixFunctions>

using namespace conset;
using namespace conset::testing;

namespace {

// Closed forms of the two test families.
Vector saddle_equilibrium(double u) { return vec2(u, -2 * u * u) / (4 * u * u - 1); }
Vector damped_equilibrium(double u) { return vec2(u / (1 + u), 0); }

double angle(const Vector& a, const Vector& b) {
  return std::acos(std::min(1.0, std::abs(a.normalized().dot(b.normalized()))));
}

}  // namespace

TEST_CASE("saddle family branches") {
  const auto sys = saddle_affine(1.0);
  const BranchTrace t = trace_branches(sys, -1.0, 1.0, 201);
  REQUIRE(t.roots.size() == 2);
  CHECK(std::abs(t.roots[0] + 0.5) < 1e-10);
  CHECK(std::abs(t.roots[1] - 0.5) < 1e-10);
  CHECK(t.suspectedTangencies.empty());
  REQUIRE(t.branches.size() == 3);
  CHECK(t.branches[0].stabilityType == StabilityType::Stable);
  CHECK(t.branches[1].stabilityType == StabilityType::Hyperbolic);
  CHECK(t.branches[2].stabilityType == StabilityType::TotallyUnstable);
  CHECK(t.branches[1].counts == EigenCounts{1, 1, 0});
  for (const auto& br : t.branches) {
    CHECK(br.continuityFlags.empty());
    for (const auto& p : br.points) {
      REQUIRE(p.kind == EquilibriumKind::Unique);
      CHECK((p.x - saddle_equilibrium(p.u[0])).norm() <= 1e-9 * (1 + p.x.norm()));
    }
  }
  const EquilibriumPoint one = solve_equilibrium(sys, scalar(1.0));
  CHECK((one.x - vec2(1.0 / 3, -2.0 / 3)).norm() < 1e-9);
  for (double u : {-1e3, 1e3}) {
    CHECK((solve_equilibrium(sys, scalar(u), true).x - vec2(0, -0.5)).norm() < 1e-3);
  }
  CHECK_THROWS_AS(solve_equilibrium(sys, scalar(2.0)), Error);
}

TEST_CASE("damped family has two unbounded branches") {
  const auto sys = damped_affine(1.2, 0.0);
  const BranchTrace t = trace_branches(sys, -1.2, 1.2, 241);
  REQUIRE(t.roots.size() == 1);
  CHECK(std::abs(t.roots[0] + 1.0) < 1e-10);
  REQUIRE(t.branches.size() == 2);
  const EquilibriumPoint at = solve_equilibrium(sys, scalar(-1.0));
  CHECK(at.kind == EquilibriumKind::NoSolution);
  REQUIRE(at.kernel.cols() == 1);
  CHECK(angle(at.kernel.col(0), vec2(1, 0)) < 1e-12);

  const Vector expected[2] = {vec2(1, 0), vec2(-1, 0)};
  for (int b = 0; b < 2; ++b) {
    const auto& br = t.branches[b];
    CHECK(br.kalmanAllOk);
    for (const auto& p : br.points) CHECK((p.x - damped_equilibrium(p.u[0])).norm() <= 1e-9 * (1 + p.x.norm()));
    REQUIRE(br.unbounded.size() == 1);
    const auto& c = br.unbounded.front();
    CHECK(c.certified);
    CHECK(c.zeroEigenvalue);
    CHECK(c.normReached >= 1e6);
    CHECK((c.direction - expected[b]).norm() < 1e-6);
    const AroundVerdict v = control_set_around(sys, br);
    CHECK(v.containsControlSet);
    CHECK(v.unbounded);
  }
}

TEST_CASE("kalman rank away from the singular control") {
  const auto sys = damped_affine(1.2, 0.0);
  int full = 0;
  for (int i = 0; i < 50; ++i) {
    const double u = -1.2 + 2.4 * (i + 0.5) / 50;
    if (std::abs(u + 1) < 1e-6) continue;
    const KalmanRecord r = kalman_rank(sys, scalar(u));
    // B′ = (0, 1/(1+u)).
    CHECK((r.Bprime - vec2(0, 1 / (1 + u))).norm() < 1e-12 * (1 + r.Bprime.norm()));
    full += r.rank == 2 ? 1 : 0;
  }
  CHECK(full == 50);
  CHECK_THROWS_AS(kalman_rank(sys, scalar(-1.0)), Error);

  // With d = (0, 1) the input column vanishes identically.
  const auto flat = damped_affine(1.2, 1.0);
  const RankScan scan = rank_scan(flat, {-0.5, 0.0, 0.5});
  CHECK(scan.failing.size() == 3);
  CHECK(scan.clusters.size() == 1);
}

TEST_CASE("shifting the origin to the equilibrium") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-0.9, 0.9), T(0.0, 3.0);
  for (const auto& sys : {saddle_affine(1.0), damped_affine(1.2, 0.0)}) {
    for (int i = 0; i < 50; ++i) {
      const double u = U(rng), t = T(rng);
      const EquilibriumPoint eq = solve_equilibrium(sys, scalar(u));
      if (eq.kind != EquilibriumKind::Unique) continue;
      const Vector x = random_vector(rng, 2);
      const Vector lhs = flow(sys, x, ControlSignal::constant(scalar(u), t), t).x - eq.x;
      const Matrix E = (eval_A(sys, scalar(u)) * t).exp();
      const Vector rhs = E * (x - eq.x);
      CHECK((lhs - rhs).norm() <= 1e-9 * (1 + rhs.norm()));
    }
  }
}

TEST_CASE("eigen counts") {
  CHECK(eigen_counts(mat2(-1, 0, 0, -2)) == EigenCounts{2, 0, 0});
  CHECK(eigen_counts(mat2(0, -1, 1, 0)) == EigenCounts{0, 0, 2});
  CHECK(eigen_counts(mat2(1, 5, 0, -1)) == EigenCounts{1, 1, 0});
}

TEST_CASE("equilibria along a path for two inputs") {
  const AffineSystem sys(mat2(-1, 0, 0, -2), {mat2(1, 0, 0, 0), mat2(0, 0, 0, 1)}, Matrix::Identity(2, 2),
                         Vector::Zero(2), ControlRange::box(vec2(-3, -3), vec2(3, 3)));
  const BranchTrace t = trace_branches(sys, ControlPath{vec2(-3, -3), vec2(3, 3)}, 121);
  CHECK_FALSE(t.scalar);
  // det = (u − 1)(v − 2) along u = v = 6s − 3: zeros at s = 2/3 and 5/6.
  REQUIRE(t.roots.size() == 2);
  CHECK(std::abs(t.roots[0] - 4.0 / 6) < 1e-10);
  CHECK(std::abs(t.roots[1] - 5.0 / 6) < 1e-10);
  CHECK(t.branches.size() == 3);
}

TEST_CASE("equilibrium verdicts from branch data") {
  const auto saddle = saddle_affine(1.0);
  const BranchTrace t = trace_branches(saddle, -1.0, 1.0, 201);
  const AroundVerdict stable = control_set_around(saddle, t.branches[0]);
  CHECK(stable.containsControlSet);
  CHECK(stable.unbounded);
  CHECK(stable.globalReachMinus);
  CHECK_FALSE(stable.globalReachPlus);
  CHECK(control_set_around(saddle, t.branches[2]).globalReachPlus);

  // With d = (0, 1) the equilibrium is (1, 0) for every u and B′ vanishes.
  const auto flat = damped_affine(1.2, 1.0);
  for (const auto& br : trace_branches(flat, -1.2, 1.2, 121).branches) {
    for (const auto& p : br.points) {
      if (p.kind == EquilibriumKind::Unique) CHECK((p.x - vec2(1, 0)).norm() < 1e-12);
    }
    const AroundVerdict v = control_set_around(flat, br);
    CHECK_FALSE(v.containsControlSet);
    CHECK(v.undecided);
  }

  const AffineSystem noInput = AffineSystem(mat2(-1, 0, 0, -2), {}, Matrix::Zero(2, 0), vec2(1, 1), ControlRange::none());
  CHECK(rank_scan(noInput, {0.0, 1.0}).failing.size() == 2);
}

TEST_CASE("unique equilibria solve the equation") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 3;
    const AffineSystem sys(random_matrix(rng, n), {random_matrix(rng, n)}, random_vector(rng, n), random_vector(rng, n),
                           ControlRange::interval(-2, 2));
    const BranchTrace t = trace_branches(sys, -2.0, 2.0, 101);
    CHECK(static_cast<int>(t.branches.size()) <= n + 1);
    for (const auto& br : t.branches) {
      for (const auto& p : br.points) {
        if (p.kind != EquilibriumKind::Unique) continue;
        CHECK((eval_A(sys, p.u) * p.x + sys.C() * p.u + sys.d()).norm() <= 1e-9 * (1 + p.x.norm()));
      }
    }
  }
}
