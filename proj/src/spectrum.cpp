#include "conset/spectrum.hpp"

#include "conset/error.hpp"
#include "conset/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace conset {

namespace {

constexpr double kZeroMargin = 1e-6;
constexpr double kReturnTol = 1e-8;

double radical_inverse(int index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * (index % base);
    index /= base;
    f /= base;
  }
  return result;
}

int prime(int i) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  return primes[i % 12];
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double cross2(const Vector& a, const Vector& b) { return a[0] * b[1] - a[1] * b[0]; }

Vector random_control(const ControlRange& omega, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (!omega.is_box()) {
    const auto& pts = omega.as_set().points;
    return pts[static_cast<std::size_t>(rng() % pts.size())];
  }
  const auto& b = omega.as_box();
  const auto grid = omega.grid_sample();
  if (unit(rng) < 0.5) return grid[static_cast<std::size_t>(rng() % grid.size())];
  Vector u(b.lower.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = b.lower[i] + unit(rng) * (b.upper[i] - b.lower[i]);
  return u;
}

std::vector<Vector> real_eigendirections(const Matrix& Av, const CellGrid& grid, const ControlSetResult& cs,
                                         std::vector<double>& exponents) {
  std::vector<Vector> dirs;
  Eigen::EigenSolver<Matrix> es(Av);
  const auto ev = es.eigenvalues();
  const double scale = std::max(1.0, Av.norm());
  std::vector<double> seen;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev[k].imag()) > 1e-12 * scale) continue;
    const double lambda = ev[k].real();
    if (std::any_of(seen.begin(), seen.end(), [&](double s) { return std::abs(s - lambda) <= 1e-12 * scale; })) {
      continue;
    }
    seen.push_back(lambda);
    const Matrix K = null_space(Av - lambda * Matrix::Identity(Av.rows(), Av.cols()), 1e-10);
    std::vector<Vector> candidates;
    if (K.cols() == 1) {
      candidates.push_back(K.col(0));
    } else if (K.cols() > 1) {
      const auto& pool = cs.interiorCells.empty() ? cs.cells : cs.interiorCells;
      const std::size_t stride = std::max<std::size_t>(1, pool.size() / 8);
      for (std::size_t i = 0; i < pool.size(); i += stride) {
        const Vector c = grid.center(pool[i]);
        const Vector p = K * (K.transpose() * c);
        if (p.norm() > 1e-12) candidates.push_back(p.normalized());
      }
    }
    for (const auto& v : candidates) {
      for (const Vector& d : {Vector(v), Vector(-v)}) {
        if (cs.contains(grid.locate(d))) {
          dirs.push_back(d);
          exponents.push_back(lambda);
        }
      }
    }
  }
  return dirs;
}

struct Return {
  bool found = false;
  double tb = 0.0;
};

// First t in (0, maxT] at which the lifted angle change (offset + drift under
// E) reaches a multiple of the period.
Return find_return(const Matrix& Ab, const Vector& s0, double offset, double period, double maxT) {
  const double speed = std::max(norm1(Ab), norm1(Ab.transpose()));
  const double dt = speed > 0.0 ? std::min(0.05, 0.5 / speed) : 0.05;
  const Matrix E = expm(Ab * dt);
  const auto level = [&](double phi) { return std::floor(phi / period); };
  Vector s = s0;
  double phi = offset;
  double t = 0.0;
  const double eps = 1e-12;
  while (t < maxT) {
    Vector next = E * s;
    next.normalize();
    const double phiNext = phi + std::atan2(cross2(s, next), s.dot(next));
    const double lvl = phiNext > phi ? level(phiNext) : level(phi);
    const double target = lvl * period;
    const bool crosses = (phi < target && phiNext >= target) || (phi > target && phiNext <= target);
    if (crosses && !(t == 0.0 && std::abs(phi - target) < eps)) {
      double lo = 0.0;
      double hi = dt;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (t + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        Vector sm = expm(Ab * mid) * s;
        sm.normalize();
        const double phiMid = phi + std::atan2(cross2(s, sm), s.dot(sm));
        if ((phiMid - target) * (phi - target) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return {true, t + 0.5 * (lo + hi)};
    }
    s = std::move(next);
    phi = phiNext;
    t += dt;
  }
  return {};
}

std::optional<SpectralSample> periodic_attempt(const AffineSystem& sys, const TransitionGraph& g,
                                               const ControlSetResult& cs, const SpectralBudget& budget,
                                               std::uint64_t stream) {
  std::mt19937_64 rng(splitmix(budget.seed ^ splitmix(stream)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const CellGrid& grid = g.grid;
  const int cell = cs.cells[static_cast<std::size_t>(rng() % cs.cells.size())];
  const double theta = grid.cell_start(cell) + (0.05 + 0.9 * unit(rng)) * grid.cell_width();
  const SphereState s = SphereState::from_angle(theta);
  const Vector ua = random_control(sys.omega(), rng);
  const Vector ub = random_control(sys.omega(), rng);
  const double ta = 0.05 + 2.0 * unit(rng);
  const double period = grid.period();

  const Matrix Aa = eval_A(sys, ua);
  const double speedA = std::max(norm1(Aa), norm1(Aa.transpose()));
  const int k = std::max(1, static_cast<int>(std::ceil(speedA * ta / 0.5)));
  const Matrix Ea = expm(Aa * (ta / k));
  Vector sa = s.vec();
  double offset = 0.0;
  for (int i = 0; i < k; ++i) {
    Vector next = Ea * sa;
    next.normalize();
    offset += std::atan2(cross2(sa, next), sa.dot(next));
    sa = std::move(next);
  }

  ControlSignal signal;
  if (std::abs(std::remainder(offset, period)) < 1e-12) {
    signal = ControlSignal::constant(ua, ta);
  } else {
    const Return r = find_return(eval_A(sys, ub), sa, offset, period, budget.maxReturnTime);
    if (!r.found) return std::nullopt;
    signal = ControlSignal({Segment{ta, ua}, Segment{r.tb, ub}});
  }
  const double T = signal.total_duration();
  const FlowPoint end = flow(sys, s.vec(), signal, T);
  const Vector d = end.x / end.x.norm();
  double residual = (d - s.vec()).norm();
  if (grid.manifold() == Manifold::ProjectiveLine) residual = std::min(residual, (d + s.vec()).norm());
  if (!(residual <= kReturnTol)) return std::nullopt;
  SpectralSample sample;
  sample.control = signal;
  sample.point = s.vec();
  sample.exponent = end.logRadius / T;
  sample.period = T;
  sample.cell = cell;
  return sample;
}

}  // namespace

const char* to_string(TriState t) {
  switch (t) {
    case TriState::Yes: return "yes";
    case TriState::No: return "no";
    case TriState::Boundary: return "boundary";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Controllable: return "Controllable";
    case Verdict::NotControllable: return "NotControllable";
    case Verdict::Undecided: return "Undecided";
  }
  return "?";
}

double lyapunov_exponent(const AffineSystem& sys, const Vector& x0, const ControlSignal& u, double horizon) {
  if (!sys.is_homogeneous()) fail(ErrorKind::InvalidInput, "lyapunov_exponent needs a homogeneous bilinear system");
  if (x0.size() != sys.dim() || x0.norm() == 0.0) fail(ErrorKind::InvalidInput, "x0 must be a nonzero n-vector");
  if (!(horizon > 0.0)) fail(ErrorKind::InvalidInput, "horizon must be positive");
  ControlSignal periodic = u;
  const double T = u.total_duration();
  if (!u.empty() && u.segments().size() > 1 && T < horizon) {
    periodic = u.repeated(static_cast<int>(std::ceil(horizon / T)));
  }
  const FlowPoint p = flow(sys, x0, periodic, horizon);
  return (p.logRadius - std::log(x0.norm())) / horizon;
}

std::vector<Vector> control_sequence(const ControlRange& omega, int count) {
  std::vector<Vector> out = omega.grid_sample();
  if (!omega.is_box()) {
    if (static_cast<int>(out.size()) > count) out.resize(static_cast<std::size_t>(count));
    return out;
  }
  const auto& b = omega.as_box();
  const int m = omega.dim();
  for (int i = 1; static_cast<int>(out.size()) < count; ++i) {
    if (m == 0) break;
    Vector u(m);
    for (int j = 0; j < m; ++j) u[j] = b.lower[j] + radical_inverse(i, prime(j)) * (b.upper[j] - b.lower[j]);
    out.push_back(std::move(u));
  }
  if (static_cast<int>(out.size()) > count) out.resize(static_cast<std::size_t>(count));
  return out;
}

SpectralEstimate floquet_spectrum_estimate(const AffineSystem& sys, const TransitionGraph& g,
                                           const ControlSetResult& cs, const SpectralBudget& budget) {
  if (!sys.is_homogeneous() || sys.dim() != 2) {
    fail(ErrorKind::InvalidInput, "spectral estimates need a planar homogeneous bilinear system");
  }
  if (!g.grid.one_dimensional() || cs.cells.empty()) {
    fail(ErrorKind::InvalidInput, "spectral estimates need a control set on the circle or projective line");
  }
  SpectralEstimate est;
  est.setRef = cs.id;
  est.manifold = g.grid.manifold();
  const int constantSlots = (budget.attempts + 1) / 2;
  const std::vector<Vector> constants = control_sequence(sys.omega(), constantSlots);
  for (int i = 0; i < budget.attempts; ++i) {
    const int slot = i / 2;
    if (i % 2 == 0 && slot < static_cast<int>(constants.size())) {
      const Vector& u = constants[static_cast<std::size_t>(slot)];
      std::vector<double> lambdas;
      const auto dirs = real_eigendirections(eval_A(sys, u), g.grid, cs, lambdas);
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        SpectralSample sample;
        sample.control = ControlSignal::constant(u, 1.0);
        sample.point = dirs[k];
        sample.exponent = lambdas[k];
        sample.period = 1.0;
        sample.cell = g.grid.locate(dirs[k]);
        sample.constantControl = true;
        est.samples.push_back(std::move(sample));
      }
      continue;
    }
    if (auto sample = periodic_attempt(sys, g, cs, budget, static_cast<std::uint64_t>(i))) {
      est.samples.push_back(std::move(*sample));
    }
  }
  if (est.samples.empty()) fail(ErrorKind::EstimateUnavailable, "no spectral sample found within the budget");
  est.lo = std::numeric_limits<double>::infinity();
  est.hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : est.samples) {
    est.lo = std::min(est.lo, s.exponent);
    est.hi = std::max(est.hi, s.exponent);
  }
  if (est.lo < -kZeroMargin && est.hi > kZeroMargin) {
    est.containsZeroInterior = TriState::Yes;
  } else if (est.hi < -kZeroMargin || est.lo > kZeroMargin) {
    est.containsZeroInterior = TriState::No;
  } else {
    est.containsZeroInterior = TriState::Boundary;
  }
  return est;
}

GlobalExponents global_exponents(const AffineSystem& sys, const std::vector<Vector>& controlSamples,
                                 int periodicSamples, std::uint64_t seed) {
  if (!sys.is_homogeneous()) fail(ErrorKind::InvalidInput, "global_exponents needs a homogeneous bilinear system");
  GlobalExponents ge;
  ge.kappaStar = std::numeric_limits<double>::infinity();
  ge.kappa = -std::numeric_limits<double>::infinity();
  std::vector<Vector> controls = controlSamples;
  if (controls.empty()) controls.push_back(Vector::Zero(sys.inputs()));
  for (const auto& u : controls) {
    const auto ev = eval_A(sys, u).eigenvalues();
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      ge.kappaStar = std::min(ge.kappaStar, ev[k].real());
      ge.kappa = std::max(ge.kappa, ev[k].real());
    }
  }
  std::mt19937_64 rng(splitmix(seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < periodicSamples && sys.inputs() > 0; ++i) {
    const Vector& ua = controls[static_cast<std::size_t>(rng() % controls.size())];
    const Vector& ub = controls[static_cast<std::size_t>(rng() % controls.size())];
    const double ta = 0.05 + 2.0 * unit(rng);
    const double tb = 0.05 + 2.0 * unit(rng);
    const Matrix M = expm(eval_A(sys, ub) * tb) * expm(eval_A(sys, ua) * ta);
    const auto mu = M.eigenvalues();
    for (Eigen::Index k = 0; k < mu.size(); ++k) {
      const double modulus = std::abs(mu[k]);
      if (!(modulus > 0.0)) continue;
      const double e = std::log(modulus) / (ta + tb);
      ge.kappaStar = std::min(ge.kappaStar, e);
      ge.kappa = std::max(ge.kappa, e);
    }
  }
  std::ostringstream os;
  os << "inner estimate: eigenvalue real parts over " << controls.size()
     << " constant controls, monodromy exponents over " << (sys.inputs() > 0 ? periodicSamples : 0)
     << " two-segment periodic controls";
  ge.method = os.str();
  return ge;
}

ControllabilityVerdict controllability_verdict(const std::vector<ControlSetResult>& projectiveSets,
                                               const CellGrid& projectiveGrid, const GlobalExponents& ge,
                                               const std::vector<ControlSetResult>* sphereSets,
                                               const CellGrid* sphereGrid) {
  ControllabilityVerdict v;
  std::ostringstream os;
  const auto count = projectiveSets.size();
  const bool sphereSplit = sphereSets && sphereGrid &&
                           (sphereSets->size() >= 2 ||
                            (sphereSets->size() == 1 &&
                             static_cast<int>(sphereSets->front().cells.size()) < sphereGrid->size()));
  if (count >= 2) {
    v.verdict = Verdict::NotControllable;
    os << count << " control sets on the projective line; the projected system is not controllable";
  } else if (count == 0) {
    v.verdict = Verdict::Undecided;
    os << "no control set with interior found on the projective line";
  } else if (static_cast<int>(projectiveSets.front().cells.size()) < projectiveGrid.size()) {
    v.verdict = Verdict::NotControllable;
    os << "the only projective control set does not cover the projective line";
  } else if (sphereSplit) {
    v.verdict = Verdict::NotControllable;
    os << sphereSets->size() << " control sets on the sphere; the projected system is not controllable";
  } else if (ge.kappaStar < -kZeroMargin && ge.kappa > kZeroMargin) {
    v.verdict = Verdict::Controllable;
    os << "projected system controllable and kappa* < 0 < kappa; approximate controllability on R^n\\{0} "
          "implies exact controllability for homogeneous bilinear systems";
  } else {
    v.verdict = Verdict::Undecided;
    os << "projected system controllable but the sampled exponents do not straddle 0 (kappa* = " << ge.kappaStar
       << ", kappa = " << ge.kappa << ")";
  }
  v.reason = os.str();
  return v;
}

}  // namespace conset
