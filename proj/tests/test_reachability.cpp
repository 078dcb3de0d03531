#include "conset/error.hpp"
#include "conset/reachability.hpp"
#include "systems.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <deque>
#include <set>

using namespace conset;
using namespace conset::testing;

namespace {

std::vector<std::vector<bool>> reach_matrix(const TransitionGraph& g) {
  const int n = g.nodes();
  std::vector<std::vector<bool>> R(n, std::vector<bool>(n, false));
  for (int s = 0; s < n; ++s) {
    std::deque<int> q{s};
    while (!q.empty()) {
      const int v = q.front();
      q.pop_front();
      for (int w : g.edges[v]) {
        if (!R[s][w]) {
          R[s][w] = true;
          q.push_back(w);
        }
      }
    }
  }
  return R;
}

// Mutual reachability classes of size ≥ 2, and whether any edge leaves them.
std::set<std::pair<std::vector<int>, bool>> oracle_sets(const TransitionGraph& g) {
  const auto R = reach_matrix(g);
  std::set<std::pair<std::vector<int>, bool>> out;
  for (int i = 0; i < g.nodes(); ++i) {
    std::vector<int> cls;
    for (int j = 0; j < g.nodes(); ++j) {
      if (i == j || (R[i][j] && R[j][i])) cls.push_back(j);
    }
    if (cls.size() < 2) continue;
    bool closed = true;
    for (int v : cls)
      for (int w : g.edges[v]) closed = closed && std::binary_search(cls.begin(), cls.end(), w);
    out.insert({cls, closed});
  }
  return out;
}

// Largest angular distance from a set's cells to the open arc (a, b).
double one_sided_hausdorff(const ControlSetResult& cs, const CellGrid& grid, double a, double b) {
  double worst = 0.0;
  for (int k : cs.cells) {
    for (double th : {grid.cell_start(k), grid.cell_start(k) + grid.cell_width()}) {
      double t = std::fmod(th - a, grid.period());
      if (t < 0) t += grid.period();
      const double len = b - a;
      if (t <= len) continue;
      worst = std::max(worst, std::min(t - len, grid.period() - t));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("cell grids") {
  const auto c = CellGrid::circle(8);
  CHECK(c.locate_angle(0.0) == 0);
  CHECK(c.locate_angle(-1e-12) == 7);
  CHECK(c.locate_angle(2 * M_PI) == 0);
  CHECK(c.locate(vec2(0, 1)) == 2);
  const auto p = CellGrid::projective(4);
  CHECK(p.locate(vec2(0, -1)) == p.locate(vec2(0, 1)));
  CHECK(p.locate(vec2(-1, -1)) == 1);
  const auto box = CellGrid::box(vec2(0, 0), vec2(2, 1), {4, 3});
  CHECK(box.size() == 12);
  CHECK(box.locate(vec2(1.9, 0.9)) == 11);
  CHECK(box.locate(vec2(2.1, 0.5)) == -1);
  CHECK(box.neighbors(0).size() == 2);
  CHECK(box.neighbors(5).size() == 4);
  CHECK_THROWS_AS(CellGrid::circle(2), Error);
}

TEST_CASE("strongly connected sets agree with a reachability oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    TransitionGraph g{CellGrid::circle(30), {}, 0.1, {}};
    g.edges.resize(30);
    std::uniform_int_distribution<int> node(0, 29), deg(0, 3);
    for (int v = 0; v < 30; ++v) {
      std::set<int> succ;
      for (int k = deg(rng); k > 0; --k) succ.insert(node(rng));
      g.edges[v].assign(succ.begin(), succ.end());
    }
    const auto expected = oracle_sets(g);
    std::set<std::pair<std::vector<int>, bool>> got;
    for (const auto& cs : find_control_sets(g)) got.insert({cs.cells, cs.invariant});
    CHECK(got == expected);
  }
}

TEST_CASE("quadrant system has four invariant quadrant sets") {
  const auto sys = quadrant_system();
  const auto grid = CellGrid::circle(720);
  const auto g = build_graph(sys, grid, sys.omega().grid_sample(), 0.2);
  const auto sets = find_control_sets(g);
  REQUIRE(sets.size() == 4);
  for (int q = 0; q < 4; ++q) {
    const auto& cs = sets[q];
    CHECK(cs.invariant);
    CHECK(cs.hasInterior);
    CHECK(cs.cells.size() == 180);
    CHECK(one_sided_hausdorff(cs, grid, q * M_PI / 2, (q + 1) * M_PI / 2) < 2.0 * M_PI / 180);
  }
  // Axes lie on cell boundaries and no edge crosses them.
  for (int k = 0; k < 720; ++k) {
    for (int j : g.edges[k]) CHECK(j / 180 == k / 180);
  }
}

TEST_CASE("shear system has two semicircle sets") {
  const auto sys = shear_system();
  const auto grid = CellGrid::circle(720);
  const auto sets = find_control_sets(build_graph(sys, grid, sys.omega().grid_sample(), 0.2));
  REQUIRE(sets.size() == 2);
  CHECK(sets[0].invariant);
  CHECK(sets[1].invariant);
  CHECK(one_sided_hausdorff(sets[0], grid, 0, M_PI) < 2.0 * M_PI / 180);
  CHECK(one_sided_hausdorff(sets[1], grid, M_PI, 2 * M_PI) < 2.0 * M_PI / 180);
  const auto arc = set_arc(sets[0], grid);
  REQUIRE(arc);
  CHECK(std::abs(arc->first) < 1e-12);
  CHECK(std::abs(arc->second - M_PI) < 1e-12);
}

TEST_CASE("time reversal transposes the graph exactly") {
  for (const auto& sys : {quadrant_system(), damped_oscillator()}) {
    for (const auto& grid : {CellGrid::circle(720), CellGrid::projective(360)}) {
      const auto controls = sys.omega().grid_sample();
      const auto fwd = build_graph(sys, grid, controls, 0.2);
      const auto rev = build_graph(time_reverse(sys), grid, controls, 0.2);
      CHECK(rev.edges == fwd.transpose().edges);
    }
  }
}

TEST_CASE("oscillator sets on the circle pair with the projective line") {
  const auto sys = damped_oscillator();
  const auto controls = sys.omega().grid_sample();
  const auto circle = CellGrid::circle(720);
  const auto proj = CellGrid::projective(360);
  const LieBasis basis = generate_lie_algebra(sys, 8);
  const auto cs = find_control_sets(build_graph(sys, circle, controls, 0.2), &basis);
  const auto ps = find_control_sets(build_graph(sys, proj, controls, 0.2), &basis);
  REQUIRE(cs.size() == 4);
  REQUIRE(ps.size() == 2);
  CHECK(std::count_if(ps.begin(), ps.end(), [](const auto& s) { return s.invariant; }) == 1);
  const auto pairing = pair_sphere_projective(cs, circle, ps, proj);
  CHECK(pairing.allAntipodal);
  for (const auto& e : pairing.entries) {
    REQUIRE(e.sphereSets.size() == 2);
    CHECK(cs[e.sphereSets[0]].invariant == ps[e.projectiveSet].invariant);
  }
  // Eigen-directions of A(±1.2) bound the sets: slopes (−3 ± √(5 − 4u))/2.
  const double slopeHi = (-3 + std::sqrt(5 + 4 * 1.2)) / 2, slopeLo = (-3 + std::sqrt(5 - 4 * 1.2)) / 2;
  const ControlSetResult& inv = ps[0].invariant ? ps[0] : ps[1];
  CHECK(inv.contains(proj.locate(vec2(1, 0.5 * (slopeLo + slopeHi)))));
  CHECK_FALSE(inv.contains(proj.locate(vec2(1, slopeLo - 0.05))));
  CHECK_FALSE(inv.contains(proj.locate(vec2(1, slopeHi + 0.05))));
}

TEST_CASE("box grid around a stable equilibrium") {
  const auto sys = damped_affine(1.2, 0.0);
  const auto grid = CellGrid::box(vec2(-2, -2), vec2(2, 2), {40, 40});
  const auto g = build_graph(sys, grid, sys.omega().grid_sample(), 0.2);
  CHECK(g.nodes() == grid.size() + 1);
  CHECK(g.edges[grid.size()].empty());
  const auto sets = find_control_sets(g);
  REQUIRE_FALSE(sets.empty());
  // Equilibria x_u = (u/(1+u), 0) for u ∈ [−0.5, 1] lie inside the box.
  const int cell = grid.locate(vec2(0.25 / 1.25, 0));
  CHECK(std::any_of(sets.begin(), sets.end(), [&](const auto& s) { return s.contains(cell); }));
}

TEST_CASE("graph preconditions") {
  CHECK_THROWS_AS(build_graph(damped_affine(), CellGrid::circle(10), {scalar(0)}, 0.2), Error);
  CHECK_THROWS_AS(build_graph(damped_oscillator(), CellGrid::circle(10), {}, 0.2), Error);
}

TEST_CASE("refinement keeps the set count") {
  for (const auto& sys : {quadrant_system(), damped_oscillator(), shear_system()}) {
    std::size_t previous = 0;
    for (int N : {360, 720, 1440}) {
      const auto sets = find_control_sets(build_graph(sys, CellGrid::circle(N), sys.omega().grid_sample(), 0.2));
      if (previous) CHECK(sets.size() == previous);
      previous = sets.size();
    }
  }
}

TEST_CASE("zero field has only self-loops") {
  const auto sys = AffineSystem::homogeneous(Matrix::Zero(2, 2), {}, ControlRange::none());
  const auto g = build_graph(sys, CellGrid::circle(36), {Vector(0)}, 0.2);
  for (int k = 0; k < 36; ++k) CHECK(g.edges[k] == std::vector<int>{k});
  CHECK(find_control_sets(g).empty());
}
