#include "conset/error.hpp"
#include "conset/spectrum.hpp"
#include "systems.hpp"

#include <catch_amalgamated.hpp>

using namespace conset;
using namespace conset::testing;

namespace {

struct Oscillator {
  AffineSystem sys = damped_oscillator(1.2);
  CellGrid proj = CellGrid::projective(360);
  CellGrid circle = CellGrid::circle(720);
  TransitionGraph gp, gc;
  std::vector<ControlSetResult> ps, cs;
  Oscillator() {
    const LieBasis basis = generate_lie_algebra(sys, 8);
    gp = build_graph(sys, proj, sys.omega().grid_sample(), 0.2);
    gc = build_graph(sys, circle, sys.omega().grid_sample(), 0.2);
    ps = find_control_sets(gp, &basis);
    cs = find_control_sets(gc, &basis);
  }
};

// Eigenvalues of A(u) are −3/2 ± √(5/4 − u).
double root(double u, int sign) { return -1.5 + sign * std::sqrt(1.25 - u); }

}  // namespace

TEST_CASE("oscillator spectra reproduce the eigenvalue endpoints") {
  const Oscillator o;
  REQUIRE(o.ps.size() == 2);
  const double d1lo = root(-1.2, -1), d1hi = root(1.2, -1);
  const double d2lo = root(1.2, +1), d2hi = root(-1.2, +1);
  CHECK(std::abs(d1lo - -3.06524758) < 1e-8);
  CHECK(std::abs(d2hi - 0.06524758) < 1e-8);
  for (const auto& set : o.ps) {
    const SpectralEstimate e = floquet_spectrum_estimate(o.sys, o.gp, set, {});
    if (set.invariant) {
      CHECK(std::abs(e.lo - d2lo) < 1e-6);
      CHECK(std::abs(e.hi - d2hi) < 1e-6);
      CHECK(e.containsZeroInterior == TriState::Yes);
    } else {
      CHECK(std::abs(e.lo - d1lo) < 1e-6);
      CHECK(std::abs(e.hi - d1hi) < 1e-6);
      CHECK(e.containsZeroInterior == TriState::No);
    }
    for (const auto& s : e.samples) {
      CHECK(set.contains(s.cell));
      CHECK(s.exponent >= e.lo);
      CHECK(s.exponent <= e.hi);
    }
  }
}

TEST_CASE("periodic samples return to their start point") {
  const Oscillator o;
  for (const auto& set : o.cs) {
    const SpectralEstimate e = floquet_spectrum_estimate(o.sys, o.gc, set, {400, 3, 20.0});
    int periodic = 0;
    for (const auto& s : e.samples) {
      if (s.constantControl) continue;
      ++periodic;
      const Vector end = flow(o.sys, s.point, s.control, s.period).x;
      const Vector dir = end.normalized();
      CHECK((dir - s.point.normalized()).norm() < 1e-7);
      CHECK(std::abs(std::log(end.norm() / s.point.norm()) / s.period - s.exponent) < 1e-9);
    }
    CHECK(periodic > 0);
  }
}

TEST_CASE("budgets are prefix-nested and seeded") {
  const Oscillator o;
  const auto& set = o.cs.front();
  const SpectralEstimate small = floquet_spectrum_estimate(o.sys, o.gc, set, {200, 9, 20.0});
  const SpectralEstimate large = floquet_spectrum_estimate(o.sys, o.gc, set, {800, 9, 20.0});
  const SpectralEstimate again = floquet_spectrum_estimate(o.sys, o.gc, set, {200, 9, 20.0});
  CHECK(large.lo <= small.lo);
  CHECK(large.hi >= small.hi);
  CHECK(small.samples.size() == again.samples.size());
  CHECK(small.lo == again.lo);
  CHECK(small.hi == again.hi);
}

TEST_CASE("no samples is an error") {
  const Oscillator o;
  ControlSetResult empty;
  empty.cells = {};
  CHECK_THROWS_AS(floquet_spectrum_estimate(o.sys, o.gc, empty, {}), Error);
}

TEST_CASE("global exponents and the controllability verdict") {
  const Oscillator o;
  const GlobalExponents ge = global_exponents(o.sys, control_sequence(o.sys.omega(), 64));
  CHECK(ge.kappaStar <= root(-1.2, -1) + 1e-12);
  CHECK(ge.kappa >= root(-1.2, +1) - 1e-12);
  const auto v = controllability_verdict(o.ps, o.proj, ge);
  CHECK(v.verdict == Verdict::NotControllable);

  // A rotation plus a scalar control is controllable on the punctured plane.
  const auto rot = AffineSystem::homogeneous(mat2(0, -1, 1, 0), {mat2(1, 0, 0, 1)}, ControlRange::interval(-1, 1));
  const LieBasis basis = generate_lie_algebra(rot, 8);
  const auto rproj = CellGrid::projective(90);
  const auto sets = find_control_sets(build_graph(rot, rproj, rot.omega().grid_sample(), 0.2), &basis);
  REQUIRE(sets.size() == 1);
  const GlobalExponents rge = global_exponents(rot, control_sequence(rot.omega(), 16));
  CHECK(std::abs(rge.kappaStar + 1.0) < 1e-12);
  CHECK(std::abs(rge.kappa - 1.0) < 1e-12);
  CHECK(controllability_verdict(sets, rproj, rge).verdict == Verdict::Controllable);
  // The same rotation without radial control cannot change radii.
  const auto pure = AffineSystem::homogeneous(mat2(0, -1, 1, 0), {mat2(0, 0, 0, 0)}, ControlRange::interval(-1, 1));
  const GlobalExponents pge = global_exponents(pure, control_sequence(pure.omega(), 16));
  CHECK(controllability_verdict(sets, rproj, pge).verdict == Verdict::Undecided);
}

TEST_CASE("control sequence") {
  const auto seq = control_sequence(ControlRange::box(vec2(-1, 0), vec2(1, 2)), 20);
  REQUIRE(seq.size() == 20);
  CHECK(seq.front() == vec2(-1, 0));
  for (const auto& u : seq) CHECK(ControlRange::box(vec2(-1, 0), vec2(1, 2)).contains(u));
  CHECK(control_sequence(shear_system().omega(), 20).size() == 3);
}

TEST_CASE("sphere and projective estimates agree") {
  const Oscillator o;
  for (const auto& p : o.ps) {
    const SpectralEstimate ep = floquet_spectrum_estimate(o.sys, o.gp, p, {});
    for (const auto& c : o.cs) {
      if (c.invariant != p.invariant) continue;
      const SpectralEstimate ec = floquet_spectrum_estimate(o.sys, o.gc, c, {});
      CHECK(std::abs(ec.lo - ep.lo) < 1e-3);
      CHECK(std::abs(ec.hi - ep.hi) < 1e-3);
    }
  }
  const auto diag = quadrant_system();
  const GlobalExponents ge = global_exponents(diag, control_sequence(diag.omega(), 9));
  CHECK(std::abs(ge.kappaStar + 1.0) < 1e-12);
  CHECK(std::abs(ge.kappa - 1.0) < 1e-12);
}
