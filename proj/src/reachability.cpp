#include "conset/reachability.hpp"

#include "conset/error.hpp"
#include "conset/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

namespace conset {

namespace {

constexpr double kShrink = 1e-9;
constexpr double kMaxAngleStep = 0.5;
constexpr double kCornerInset = 1e-6;

template <class F>
void parallel_for(int count, F&& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(std::max(count, 1))));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

double cross2(const Vector& a, const Vector& b) { return a[0] * b[1] - a[1] * b[0]; }

struct AngularStepper {
  Matrix E;
  int steps;
};

// Lifted angle after following the linear flow for the full edge time.
double lifted_endpoint(const AngularStepper& st, double theta0) {
  Vector s(2);
  s << std::cos(theta0), std::sin(theta0);
  double theta = theta0;
  for (int k = 0; k < st.steps; ++k) {
    Vector next = st.E * s;
    next /= next.norm();
    theta += std::atan2(cross2(s, next), s.dot(next));
    s = std::move(next);
  }
  return theta;
}

std::vector<int> edges_1d(const CellGrid& grid, const std::vector<AngularStepper>& steppers, int cell) {
  const double delta = grid.cell_width();
  const double period = grid.period();
  const int N = grid.size();
  const double a = grid.cell_start(cell);
  const double b = grid.cell_start(cell + 1);
  std::set<int> out;
  for (const auto& st : steppers) {
    const double lo = std::min(a, lifted_endpoint(st, a)) + kShrink * delta;
    const double hi = std::max(b, lifted_endpoint(st, b)) - kShrink * delta;
    if (hi - lo >= period) {
      for (int j = 0; j < N; ++j) out.insert(j);
      break;
    }
    const auto first = static_cast<long>(std::floor(lo / delta));
    const auto last = static_cast<long>(std::ceil(hi / delta)) - 1;
    for (long j = first; j <= last; ++j) out.insert(static_cast<int>(((j % N) + N) % N));
  }
  return {out.begin(), out.end()};
}

struct AffineStepper {
  AffineStep step;
  int steps;
};

std::vector<int> edges_box(const CellGrid& grid, const std::vector<AffineStepper>& steppers, int cell) {
  const int nx = grid.per_axis()[0];
  Vector width(2);
  width << (grid.upper()[0] - grid.lower()[0]) / nx, (grid.upper()[1] - grid.lower()[1]) / grid.per_axis()[1];
  const int ix = cell % nx;
  const int iy = cell / nx;
  Vector lo(2);
  lo << grid.lower()[0] + ix * width[0], grid.lower()[1] + iy * width[1];
  std::vector<Vector> samples{grid.center(cell)};
  for (int cx = 0; cx < 2; ++cx) {
    for (int cy = 0; cy < 2; ++cy) {
      Vector p(2);
      p[0] = lo[0] + (cx == 0 ? kCornerInset : 1.0 - kCornerInset) * width[0];
      p[1] = lo[1] + (cy == 0 ? kCornerInset : 1.0 - kCornerInset) * width[1];
      samples.push_back(p);
    }
  }
  std::set<int> out{cell};
  for (const auto& st : steppers) {
    for (const auto& p0 : samples) {
      Vector x = p0;
      for (int k = 0; k < st.steps; ++k) {
        x = st.step.E * x + st.step.w;
        const int j = grid.locate(x);
        if (j < 0) {
          out.insert(grid.size());
          break;
        }
        out.insert(j);
      }
    }
  }
  return {out.begin(), out.end()};
}

// Iterative Tarjan; returns component id per node.
std::vector<int> tarjan(const std::vector<std::vector<int>>& adj, int& count) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> onStack(n, 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;
  int next = 0;
  count = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = next++;
    stack.push_back(root);
    onStack[root] = 1;
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      if (pos < adj[v].size()) {
        const int w = adj[v][pos++];
        if (index[w] < 0) {
          index[w] = low[w] = next++;
          stack.push_back(w);
          onStack[w] = 1;
          call.emplace_back(w, 0);
        } else if (onStack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        while (true) {
          const int w = stack.back();
          stack.pop_back();
          onStack[w] = 0;
          comp[w] = count;
          if (w == done) break;
        }
        ++count;
      }
    }
  }
  return comp;
}

}  // namespace

const char* to_string(Manifold m) {
  switch (m) {
    case Manifold::Circle: return "circle";
    case Manifold::ProjectiveLine: return "projective";
    case Manifold::Box: return "box";
  }
  return "?";
}

CellGrid CellGrid::circle(int cells) {
  if (cells < 3) fail(ErrorKind::InvalidInput, "circle grid needs at least 3 cells");
  CellGrid g;
  g.manifold_ = Manifold::Circle;
  g.size_ = cells;
  return g;
}

CellGrid CellGrid::projective(int cells) {
  if (cells < 3) fail(ErrorKind::InvalidInput, "projective grid needs at least 3 cells");
  CellGrid g;
  g.manifold_ = Manifold::ProjectiveLine;
  g.size_ = cells;
  return g;
}

CellGrid CellGrid::box(Vector lower, Vector upper, std::vector<int> perAxis) {
  if (lower.size() != 2 || upper.size() != 2 || perAxis.size() != 2) {
    fail(ErrorKind::InvalidInput, "box grids are planar");
  }
  if (!(lower.array() < upper.array()).all()) fail(ErrorKind::InvalidInput, "box grid bounds are empty");
  if (perAxis[0] < 1 || perAxis[1] < 1) fail(ErrorKind::InvalidInput, "box grid needs positive cell counts");
  CellGrid g;
  g.manifold_ = Manifold::Box;
  g.size_ = perAxis[0] * perAxis[1];
  g.lower_ = std::move(lower);
  g.upper_ = std::move(upper);
  g.perAxis_ = std::move(perAxis);
  return g;
}

double CellGrid::period() const {
  switch (manifold_) {
    case Manifold::Circle: return 2.0 * M_PI;
    case Manifold::ProjectiveLine: return M_PI;
    case Manifold::Box: break;
  }
  fail(ErrorKind::InvalidInput, "box grids have no period");
}

double CellGrid::resolution() const {
  if (one_dimensional()) return cell_width();
  const double wx = (upper_[0] - lower_[0]) / perAxis_[0];
  const double wy = (upper_[1] - lower_[1]) / perAxis_[1];
  return std::hypot(wx, wy);
}

int CellGrid::locate_angle(double theta) const {
  const double P = period();
  double t = std::fmod(theta, P);
  if (t < 0.0) t += P;
  const int k = static_cast<int>(std::floor(t / cell_width()));
  return std::clamp(k, 0, size_ - 1);
}

int CellGrid::locate(const Vector& x) const {
  if (x.size() != 2) fail(ErrorKind::InvalidInput, "grids are planar or circular");
  if (one_dimensional()) return locate_angle(std::atan2(x[1], x[0]));
  if (!(x[0] >= lower_[0] && x[0] < upper_[0] && x[1] >= lower_[1] && x[1] < upper_[1])) return -1;
  const int ix = std::min(perAxis_[0] - 1, static_cast<int>((x[0] - lower_[0]) / (upper_[0] - lower_[0]) * perAxis_[0]));
  const int iy = std::min(perAxis_[1] - 1, static_cast<int>((x[1] - lower_[1]) / (upper_[1] - lower_[1]) * perAxis_[1]));
  return iy * perAxis_[0] + ix;
}

Vector CellGrid::center(int k) const {
  Vector c(2);
  if (one_dimensional()) {
    const double theta = (k + 0.5) * cell_width();
    c << std::cos(theta), std::sin(theta);
    return c;
  }
  const int ix = k % perAxis_[0];
  const int iy = k / perAxis_[0];
  c[0] = lower_[0] + (ix + 0.5) * (upper_[0] - lower_[0]) / perAxis_[0];
  c[1] = lower_[1] + (iy + 0.5) * (upper_[1] - lower_[1]) / perAxis_[1];
  return c;
}

std::vector<int> CellGrid::neighbors(int k) const {
  if (one_dimensional()) return {(k + size_ - 1) % size_, (k + 1) % size_};
  const int nx = perAxis_[0];
  const int ny = perAxis_[1];
  const int ix = k % nx;
  const int iy = k / nx;
  std::vector<int> out;
  if (ix > 0) out.push_back(k - 1);
  if (ix + 1 < nx) out.push_back(k + 1);
  if (iy > 0) out.push_back(k - nx);
  if (iy + 1 < ny) out.push_back(k + nx);
  return out;
}

bool CellGrid::operator==(const CellGrid& other) const {
  if (manifold_ != other.manifold_ || size_ != other.size_) return false;
  if (one_dimensional()) return true;
  return lower_ == other.lower_ && upper_ == other.upper_ && perAxis_ == other.perAxis_;
}

bool TransitionGraph::has_edge(int i, int j) const {
  const auto& e = edges.at(static_cast<std::size_t>(i));
  return std::binary_search(e.begin(), e.end(), j);
}

TransitionGraph TransitionGraph::transpose() const {
  TransitionGraph t{grid, controls, tau, std::vector<std::vector<int>>(edges.size())};
  for (int i = 0; i < nodes(); ++i) {
    for (int j : edges[static_cast<std::size_t>(i)]) t.edges[static_cast<std::size_t>(j)].push_back(i);
  }
  return t;
}

TransitionGraph build_graph(const AffineSystem& sys, const CellGrid& grid, const std::vector<Vector>& controls,
                            double tau) {
  if (controls.empty()) fail(ErrorKind::InvalidInput, "empty control sample");
  if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorKind::InvalidInput, "tau must be positive");
  if (sys.dim() != 2) fail(ErrorKind::InvalidInput, "graph discretization supports n = 2");
  for (const auto& u : controls) {
    if (u.size() != sys.inputs()) fail(ErrorKind::InvalidInput, "control sample length differs from m");
  }
  TransitionGraph g{grid, controls, tau, {}};
  const int N = grid.size();
  if (grid.one_dimensional()) {
    if (!sys.is_homogeneous()) fail(ErrorKind::InvalidInput, "circle and projective grids need a homogeneous system");
    std::vector<AngularStepper> steppers;
    for (const auto& u : controls) {
      const Matrix Av = eval_A(sys, u);
      const double speed = std::max(norm1(Av), norm1(Av.transpose()));
      const int k = std::max(1, static_cast<int>(std::ceil(speed * tau / kMaxAngleStep)));
      steppers.push_back({expm(Av * (tau / k)), k});
    }
    g.edges.resize(static_cast<std::size_t>(N));
    parallel_for(N, [&](int i) { g.edges[static_cast<std::size_t>(i)] = edges_1d(grid, steppers, i); });
    return g;
  }
  double wmin = std::min((grid.upper()[0] - grid.lower()[0]) / grid.per_axis()[0],
                         (grid.upper()[1] - grid.lower()[1]) / grid.per_axis()[1]);
  std::vector<AffineStepper> steppers;
  for (const auto& u : controls) {
    const Matrix Av = eval_A(sys, u);
    const Vector b = sys.C() * u + sys.d();
    double speed = 0.0;
    for (int cx = 0; cx < 2; ++cx) {
      for (int cy = 0; cy < 2; ++cy) {
        Vector corner(2);
        corner << (cx ? grid.upper()[0] : grid.lower()[0]), (cy ? grid.upper()[1] : grid.lower()[1]);
        speed = std::max(speed, (Av * corner + b).norm());
      }
    }
    const int k = speed == 0.0 ? 1 : std::max(1, static_cast<int>(std::ceil(speed * tau / wmin)));
    steppers.push_back({affine_step(Av, b, tau / k), k});
  }
  g.edges.resize(static_cast<std::size_t>(N) + 1);
  parallel_for(N, [&](int i) { g.edges[static_cast<std::size_t>(i)] = edges_box(grid, steppers, i); });
  return g;
}

bool ControlSetResult::contains(int cell) const { return std::binary_search(cells.begin(), cells.end(), cell); }

std::vector<ControlSetResult> find_control_sets(const TransitionGraph& g, const LieBasis* accessibility) {
  int count = 0;
  const std::vector<int> comp = tarjan(g.edges, count);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(count));
  for (int v = 0; v < g.grid.size(); ++v) members[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])].push_back(v);
  std::vector<ControlSetResult> out;
  for (auto& cells : members) {
    if (cells.size() < 2) continue;
    ControlSetResult cs;
    cs.manifold = g.grid.manifold();
    cs.cells = std::move(cells);
    if (accessibility && g.grid.one_dimensional()) {
      const bool ok = std::any_of(cs.cells.begin(), cs.cells.end(), [&](int c) {
        return rank_at_projective(*accessibility, SphereState(g.grid.center(c))) == 1;
      });
      if (!ok) continue;
    }
    cs.invariant = true;
    for (int c : cs.cells) {
      for (int j : g.edges[static_cast<std::size_t>(c)]) {
        if (j == g.exterior()) cs.touchesExterior = true;
        if (!cs.contains(j)) cs.invariant = false;
      }
      const auto nb = g.grid.neighbors(c);
      const bool inner = (g.grid.one_dimensional() || nb.size() == 4) &&
                         std::all_of(nb.begin(), nb.end(), [&](int k) { return cs.contains(k); });
      if (inner) cs.interiorCells.push_back(c);
    }
    cs.hasInterior = !cs.interiorCells.empty();
    out.push_back(std::move(cs));
  }
  std::sort(out.begin(), out.end(), [](const ControlSetResult& a, const ControlSetResult& b) {
    if (a.cells.size() != b.cells.size()) return a.cells.size() > b.cells.size();
    return a.cells.front() < b.cells.front();
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

std::vector<std::pair<int, int>> cell_ranges(const ControlSetResult& cs, const CellGrid& grid) {
  std::vector<std::pair<int, int>> ranges;
  for (int c : cs.cells) {
    if (!ranges.empty() && ranges.back().second + 1 == c) {
      ranges.back().second = c;
    } else {
      ranges.emplace_back(c, c);
    }
  }
  if (grid.one_dimensional() && ranges.size() > 1 && ranges.front().first == 0 &&
      ranges.back().second == grid.size() - 1) {
    ranges.front().first = ranges.back().first;
    ranges.pop_back();
  }
  return ranges;
}

std::optional<std::pair<double, double>> set_arc(const ControlSetResult& cs, const CellGrid& grid) {
  if (!grid.one_dimensional()) fail(ErrorKind::InvalidInput, "set_arc needs a 1-D grid");
  const int N = grid.size();
  if (static_cast<int>(cs.cells.size()) >= N) return std::nullopt;
  int bestGap = -1;
  int afterGap = cs.cells.front();
  for (std::size_t i = 0; i < cs.cells.size(); ++i) {
    const int cur = cs.cells[i];
    const int nxt = i + 1 < cs.cells.size() ? cs.cells[i + 1] : cs.cells.front() + N;
    if (nxt - cur - 1 > bestGap) {
      bestGap = nxt - cur - 1;
      afterGap = nxt % N;
    }
  }
  const double start = grid.cell_start(afterGap);
  const double length = (N - bestGap) * grid.cell_width();
  return std::make_pair(start, start + length);
}

PairingReport pair_sphere_projective(const std::vector<ControlSetResult>& circleSets, const CellGrid& circle,
                                     const std::vector<ControlSetResult>& projSets, const CellGrid& projective) {
  if (circle.manifold() != Manifold::Circle || projective.manifold() != Manifold::ProjectiveLine ||
      circle.size() != 2 * projective.size()) {
    fail(ErrorKind::InvalidInput, "pairing needs a circle grid with twice the projective cell count");
  }
  const int Np = projective.size();
  const int Nc = circle.size();
  auto antipode = [&](const ControlSetResult& cs) {
    std::vector<int> cells;
    for (int c : cs.cells) cells.push_back((c + Np) % Nc);
    std::sort(cells.begin(), cells.end());
    return cells;
  };
  PairingReport report;
  for (const auto& P : projSets) {
    PairingEntry entry;
    entry.projectiveSet = P.id;
    for (const auto& C : circleSets) {
      if (std::any_of(C.cells.begin(), C.cells.end(), [&](int c) { return P.contains(c % Np); })) {
        entry.sphereSets.push_back(C.id);
      }
    }
    if (entry.sphereSets.empty() || entry.sphereSets.size() > 2) {
      fail(ErrorKind::InternalInconsistency,
           "projective control set " + std::to_string(P.id) + " has " + std::to_string(entry.sphereSets.size()) +
               " sphere preimages; refine the grid");
    }
    const auto& C1 = circleSets[static_cast<std::size_t>(entry.sphereSets[0])];
    if (entry.sphereSets.size() == 2) {
      entry.antipodal = antipode(C1) == circleSets[static_cast<std::size_t>(entry.sphereSets[1])].cells;
      report.allAntipodal = report.allAntipodal && entry.antipodal;
    } else {
      entry.singlePreimage = true;
      const bool selfAntipodal = antipode(C1) == C1.cells;
      report.allAntipodal = report.allAntipodal && selfAntipodal;
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace conset
