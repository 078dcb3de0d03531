#include "conset/liealgebra.hpp"
#include "systems.hpp"

#include <catch_amalgamated.hpp>

using namespace conset;
using namespace conset::testing;

TEST_CASE("bracket is the commutator") {
  const Matrix X = mat2(0, 1, 0, 0), Y = mat2(0, 0, 1, 0);
  CHECK(bracket(X, Y) == mat2(1, 0, 0, -1));
  CHECK(bracket(X, X).norm() == 0.0);
}

TEST_CASE("generated algebra dimensions") {
  // Commuting diagonal generators.
  const LieBasis diag = generate_lie_algebra(quadrant_system(), 8);
  CHECK(diag.span.size() == 2);
  CHECK(diag.saturated);
  // Oscillator: A and B generate gl(2).
  const LieBasis osc = generate_lie_algebra(damped_oscillator(), 8);
  CHECK(osc.span.size() == 4);
  // sl(2) from the nilpotent pair.
  const AffineSystem sl2 = AffineSystem::homogeneous(mat2(0, 1, 0, 0), {mat2(0, 0, 1, 0)}, ControlRange::interval(-1, 1));
  CHECK(generate_lie_algebra(sl2, 8).span.size() == 3);
  // Span is Frobenius-orthonormal.
  for (std::size_t i = 0; i < osc.span.size(); ++i)
    for (std::size_t j = 0; j < osc.span.size(); ++j)
      CHECK(std::abs((osc.span[i].array() * osc.span[j].array()).sum() - (i == j ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("projective accessibility fails on invariant axes") {
  const LieBasis diag = generate_lie_algebra(quadrant_system(), 8);
  CHECK(rank_at_projective(diag, SphereState(vec2(1, 0))) == 0);
  CHECK(rank_at_projective(diag, SphereState(vec2(1, 1))) == 1);
  const ArcReport arc = check_arc_projective(diag, sphere_samples(2, 8, 1));
  // Eight evenly spaced points hit the four axis directions.
  CHECK(arc.failures.size() == 4);

  const LieBasis shear = generate_lie_algebra(shear_system(), 8);
  CHECK(rank_at_projective(shear, SphereState(vec2(1, 0))) == 0);
  CHECK(rank_at_projective(shear, SphereState(vec2(0, 1))) == 1);
}

TEST_CASE("rank transfer from projective space to the sphere on random systems") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dimDist(2, 4), inputDist(1, 2);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = dimDist(rng);
    const int m = inputDist(rng);
    std::vector<Matrix> B;
    for (int i = 0; i < m; ++i) B.push_back(random_matrix(rng, n));
    const auto sys = AffineSystem::homogeneous(random_matrix(rng, n), B,
                                               ControlRange::box(-Vector::Ones(m), Vector::Ones(m)));
    const LieBasis basis = generate_lie_algebra(sys, 6);
    const ArcReport arc = check_arc_projective(basis, sphere_samples(n, 16, 100 + trial));
    CHECK(arc.transferHolds);
    for (const auto& p : arc.points) {
      if (p.projectiveRank == n - 1) {
        CHECK(p.sphereRank == n - 1);
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("sphere samples") {
  const auto circle = sphere_samples(2, 4, 9);
  REQUIRE(circle.size() == 4);
  CHECK((circle[0].vec() - vec2(1, 0)).norm() < 1e-15);
  const auto a = sphere_samples(3, 5, 9), b = sphere_samples(3, 5, 9);
  for (int i = 0; i < 5; ++i) {
    CHECK(a[i].vec() == b[i].vec());
    CHECK(std::abs(a[i].vec().norm() - 1.0) < 1e-15);
  }
}
