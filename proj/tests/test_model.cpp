#include "conset/error.hpp"
#include "conset/model.hpp"
#include "systems.hpp"

#include <catch_amalgamated.hpp>

#include <limits>

using namespace conset;
using namespace conset::testing;

TEST_CASE("control range membership is exact") {
  const auto box = ControlRange::box(vec2(-1, -1), vec2(1, 1));
  CHECK(box.contains(vec2(1, -1)));
  CHECK_FALSE(box.contains(vec2(1 + 1e-15, 0)));
  CHECK(box.grid_sample().size() == 9);

  const auto set = ControlRange::finite_set({scalar(0), scalar(-1)});
  CHECK(set.contains(scalar(-1)));
  CHECK_FALSE(set.contains(scalar(-0.5)));
  CHECK(set.shifted(scalar(-1)).contains(scalar(1)));
}

TEST_CASE("control range rejects bad shapes") {
  CHECK_THROWS_AS(ControlRange::box(vec2(1, 0), vec2(0, 1)), Error);
  CHECK_THROWS_AS(ControlRange::finite_set({}), Error);
  CHECK_THROWS_AS(ControlRange::finite_set({scalar(0), vec2(0, 0)}), Error);
}

TEST_CASE("system validation") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(AffineSystem::homogeneous(mat2(nan, 0, 0, 0), {}, ControlRange::none()), Error);
  CHECK_THROWS_AS(AffineSystem::homogeneous(Matrix::Zero(2, 3), {}, ControlRange::none()), Error);
  CHECK_THROWS_AS(AffineSystem::homogeneous(Matrix::Zero(2, 2), {Matrix::Zero(2, 2)}, ControlRange::none()), Error);

  CHECK(quadrant_system().kind() == SystemKind::HomogeneousBilinear);
  CHECK(damped_affine().kind() == SystemKind::InhomogeneousBilinear);
  CHECK(damped_affine(1.2, 0.5).kind() == SystemKind::Affine);
  CHECK(time_reverse(damped_affine(1.2, 0.5)).kind() == SystemKind::Affine);
}

TEST_CASE("eval_A and eval_rhs") {
  const auto sys = saddle_affine();
  CHECK(eval_A(sys, scalar(0.5)).isApprox(mat2(1, 1, 1, 1)));
  CHECK(eval_rhs(sys, vec2(1, 2), scalar(1)).isApprox(vec2(2 + 2, 1 + 4 + 1)));
}

TEST_CASE("time reversal negates the field") {
  const auto sys = damped_affine(1.2, 0.3);
  const auto rev = time_reverse(sys);
  const Vector x = vec2(0.4, -1.1);
  const Vector u = scalar(0.7);
  CHECK((eval_rhs(rev, x, u) + eval_rhs(sys, x, u)).norm() == 0.0);
  CHECK(time_reverse(rev) == sys);
}

TEST_CASE("homogenize_shift needs a zero inhomogeneity") {
  const auto sys = damped_affine();
  CHECK_THROWS_AS(homogenize_shift(sys, scalar(0.5)), ResidualError);
  CHECK(homogenize_shift(quadrant_system(), vec2(0, 0)) == quadrant_system());

  const AffineSystem offset(mat2(0, 1, -1, -3), {mat2(0, 0, -1, 0)}, vec2(0, 1), vec2(0, -1),
                            ControlRange::interval(-2, 2));
  const auto h = homogenize_shift(offset, scalar(1.0));
  CHECK(h.kind() == SystemKind::InhomogeneousBilinear);
  CHECK(h.A() == mat2(0, 1, -2, -3));
  CHECK(h.C() == offset.C());
  CHECK(h.omega() == ControlRange::interval(-3, 1));
  CHECK_THROWS_AS(homogenize_shift(offset, scalar(3.0)), Error);
}

TEST_CASE("evaluation paths agree exactly") {
  const auto sys = damped_affine(1.2, 0.25);
  const Vector x = vec2(0.3, -2.5), u = scalar(0.9);
  const Vector direct = eval_A(sys, u) * x + sys.C() * u + sys.d();
  CHECK(eval_rhs(sys, x, u) == direct);
}

TEST_CASE("control signals are canonical") {
  const ControlSignal u({{1.0, scalar(1)}, {0.0, scalar(5)}, {0.5, scalar(1)}, {2.0, scalar(-1)}});
  REQUIRE(u.segments().size() == 2);
  CHECK(u.segments()[0].duration == 1.5);
  CHECK(u.total_duration() == 3.5);
  CHECK(u.value_at(1.49)[0] == 1.0);
  CHECK(u.value_at(1.5)[0] == -1.0);
  CHECK(u.value_at(100.0)[0] == -1.0);
  CHECK(u.reversed().segments().front().value[0] == -1.0);
  CHECK(u.repeated(3).total_duration() == Catch::Approx(10.5));
  CHECK(u.then(ControlSignal::constant(scalar(-1), 1.0)).segments().size() == 2);
  CHECK(u.shifted(10.0).value_at(0.0)[0] == -1.0);
  CHECK_THROWS_AS(ControlSignal({{-1.0, scalar(0)}}), Error);
  CHECK_THROWS_AS(ControlSignal({{1.0, scalar(0)}, {1.0, vec2(0, 0)}}), Error);
  CHECK_THROWS_AS(u.validate(ControlRange::interval(0, 1)), Error);
  CHECK_NOTHROW(u.validate(ControlRange::interval(-1, 1)));
}
