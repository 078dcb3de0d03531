#include "conset/equilibria.hpp"

#include "conset/error.hpp"
#include "conset/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace conset {

namespace {

constexpr double kDetRel = 1e-10;
constexpr double kConsistency = 1e-6;
constexpr double kRootWidth = 1e-12;
constexpr double kTangency = 1e-8;
constexpr double kUnboundedNorm = 1e6;
constexpr double kUnboundedMaxNorm = 1e12;
constexpr double kAngleTol = 1e-6;
constexpr double kZeroEigen = 1e-8;

double det_at(const AffineSystem& sys, const ControlPath& path, double s) {
  return eval_A(sys, path.at(s)).determinant();
}

double path_length(const ControlPath& path) {
  const double len = (path.end - path.start).norm();
  return len > 0.0 ? len : 1.0;
}

double angle_to_subspace(const Vector& dir, const Matrix& K) {
  if (K.cols() == 0) return M_PI / 2;
  const Vector proj = K * (K.transpose() * dir);
  return std::atan2((dir - proj).norm(), proj.norm());
}

StabilityType classify(const EigenCounts& c, int n) {
  if (c.marginal > 0) return StabilityType::Marginal;
  if (c.negRe == n) return StabilityType::Stable;
  if (c.posRe == n) return StabilityType::TotallyUnstable;
  return StabilityType::Hyperbolic;
}

}  // namespace

const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::Unique: return "Unique";
    case EquilibriumKind::AffineSubspace: return "AffineSubspace";
    case EquilibriumKind::NoSolution: return "NoSolution";
  }
  return "?";
}

const char* to_string(StabilityType t) {
  switch (t) {
    case StabilityType::Stable: return "Stable";
    case StabilityType::TotallyUnstable: return "TotallyUnstable";
    case StabilityType::Hyperbolic: return "Hyperbolic";
    case StabilityType::Marginal: return "Marginal";
    case StabilityType::Varying: return "Varying";
  }
  return "?";
}

EquilibriumPoint solve_equilibrium(const AffineSystem& sys, const Vector& u, bool allowOutside) {
  if (u.size() != sys.inputs()) fail(ErrorKind::InvalidInput, "control length differs from m");
  if (!allowOutside && !sys.omega().contains(u)) fail(ErrorKind::InvalidInput, "control outside the control range");
  const int n = sys.dim();
  const Matrix Au = eval_A(sys, u);
  const Vector rhs = sys.C() * u + sys.d();
  EquilibriumPoint p;
  p.u = u;
  p.detA = Au.determinant();
  const double scale = std::pow(Au.norm(), n);
  if (scale > 0.0 && std::abs(p.detA) > kDetRel * scale) {
    p.kind = EquilibriumKind::Unique;
    p.x = -Au.partialPivLu().solve(rhs);
    p.kernel = Matrix(n, 0);
    p.residual = (Au * p.x + rhs).norm();
    return p;
  }
  Eigen::JacobiSVD<Matrix> svd(Au, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = std::max(1e-9 * (sv.size() ? sv[0] : 0.0), 1e-300);
  Vector x = Vector::Zero(n);
  const Vector Utb = svd.matrixU().transpose() * rhs;
  Eigen::Index r = 0;
  for (; r < sv.size() && sv[r] > cutoff; ++r) x -= (Utb[r] / sv[r]) * svd.matrixV().col(r);
  p.x = x;
  p.kernel = svd.matrixV().rightCols(n - r);
  p.residual = (Au * x + rhs).norm();
  p.kind = p.residual <= kConsistency * rhs.norm() ? EquilibriumKind::AffineSubspace : EquilibriumKind::NoSolution;
  return p;
}

Matrix b_prime(const AffineSystem& sys, const Vector& x) {
  Matrix Bp = sys.C();
  for (int i = 0; i < sys.inputs(); ++i) Bp.col(i) += sys.B()[static_cast<std::size_t>(i)] * x;
  return Bp;
}

KalmanRecord kalman_rank(const AffineSystem& sys, const Vector& u, bool allowOutside) {
  const EquilibriumPoint eq = solve_equilibrium(sys, u, allowOutside);
  if (eq.kind == EquilibriumKind::NoSolution) fail(ErrorKind::PreconditionFailed, "no equilibrium at this control");
  const int n = sys.dim();
  const int m = sys.inputs();
  KalmanRecord rec;
  rec.u = u;
  rec.particular = eq.kind == EquilibriumKind::AffineSubspace;
  rec.Bprime = b_prime(sys, eq.x);
  if (m == 0) return rec;
  const Matrix Au = eval_A(sys, u);
  Matrix K(n, n * m);
  Matrix block = rec.Bprime;
  for (int k = 0; k < n; ++k) {
    K.middleCols(k * m, m) = block;
    block = Au * block;
  }
  double scale = sys.C().norm();
  for (const auto& Bi : sys.B()) scale += Bi.norm() * eq.x.norm();
  const RankInfo info = numerical_rank(K, 1e-9, 1e-12 * std::max(1.0, scale));
  rec.rank = info.rank;
  rec.marginal = info.marginal;
  return rec;
}

EigenCounts eigen_counts(const Matrix& M, double margin) {
  EigenCounts c;
  const auto ev = M.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev[k].real() < -margin) {
      ++c.negRe;
    } else if (ev[k].real() > margin) {
      ++c.posRe;
    } else {
      ++c.marginal;
    }
  }
  return c;
}

UnboundedCertificate certify_unbounded(const AffineSystem& sys, const ControlPath& path, double sSingular,
                                       double sInside) {
  UnboundedCertificate cert;
  const Vector u0 = path.at(sSingular);
  cert.uSingular = sys.inputs() == 1 ? u0[0] : sSingular;
  const Matrix A0 = eval_A(sys, u0);
  const auto ev = A0.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) cert.zeroEigenvalue = cert.zeroEigenvalue || std::abs(ev[k]) < kZeroEigen;
  cert.outsideRange = solve_equilibrium(sys, u0, true).kind == EquilibriumKind::NoSolution;
  const Matrix K = null_space(A0, 1e-9);
  const double side = sInside > sSingular ? 1.0 : -1.0;
  double delta = std::abs(sInside - sSingular);
  cert.angleToKernel = M_PI / 2;
  while (delta > 1e-15) {
    delta *= 0.5;
    const EquilibriumPoint p = solve_equilibrium(sys, path.at(sSingular + side * delta), true);
    if (p.kind != EquilibriumKind::Unique) break;
    const double r = p.x.norm();
    if (!(r > 0.0) || !std::isfinite(r)) break;
    cert.direction = p.x / r;
    cert.normReached = r;
    cert.angleToKernel = angle_to_subspace(cert.direction, K);
    if (r >= kUnboundedNorm && cert.angleToKernel <= kAngleTol) break;
    if (r >= kUnboundedMaxNorm) break;
  }
  cert.certified = cert.zeroEigenvalue && cert.outsideRange && cert.normReached >= kUnboundedNorm &&
                   cert.angleToKernel <= kAngleTol;
  return cert;
}

BranchTrace trace_branches(const AffineSystem& sys, double uLo, double uHi, int gridPoints) {
  if (sys.inputs() != 1) fail(ErrorKind::InvalidInput, "scalar branch tracing needs m = 1; pass a control path");
  if (!(uLo < uHi)) fail(ErrorKind::InvalidInput, "need uLo < uHi");
  return trace_branches(sys, ControlPath{Vector::Constant(1, uLo), Vector::Constant(1, uHi)}, gridPoints);
}

BranchTrace trace_branches(const AffineSystem& sys, const ControlPath& path, int gridPoints) {
  if (gridPoints < 2) fail(ErrorKind::InvalidInput, "need at least 2 grid points");
  if (path.start.size() != sys.inputs() || path.end.size() != sys.inputs() || sys.inputs() == 0) {
    fail(ErrorKind::InvalidInput, "path endpoints must be m-vectors with m >= 1");
  }
  BranchTrace trace;
  trace.path = path;
  trace.scalar = sys.inputs() == 1;
  const int n = sys.dim();
  const double len = path_length(path);
  auto report = [&](double s) { return trace.scalar ? path.at(s)[0] : s; };

  std::vector<double> grid(static_cast<std::size_t>(gridPoints));
  std::vector<double> dets(grid.size());
  for (int i = 0; i < gridPoints; ++i) {
    grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (gridPoints - 1);
    dets[static_cast<std::size_t>(i)] = det_at(sys, path, grid[static_cast<std::size_t>(i)]);
  }
  std::vector<double> roots;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (dets[i] == 0.0) roots.push_back(grid[i]);
    if (i + 1 < grid.size() && dets[i] != 0.0 && dets[i + 1] != 0.0 && (dets[i] < 0.0) != (dets[i + 1] < 0.0)) {
      double lo = grid[i], hi = grid[i + 1];
      const bool loNeg = dets[i] < 0.0;
      for (int it = 0; it < 200 && (hi - lo) * len > kRootWidth; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double dm = det_at(sys, path, mid);
        if (dm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((dm < 0.0) == loNeg) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
  }
  std::sort(roots.begin(), roots.end());
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double a = std::abs(dets[i]);
    if (dets[i] == 0.0 || a >= kTangency) continue;
    if (a <= std::abs(dets[i - 1]) && a <= std::abs(dets[i + 1]) && (dets[i - 1] < 0.0) == (dets[i + 1] < 0.0) &&
        (dets[i] < 0.0) == (dets[i - 1] < 0.0)) {
      trace.suspectedTangencies.push_back(report(grid[i]));
    }
  }
  for (double r : roots) trace.roots.push_back(report(r));

  std::vector<double> cuts{0.0};
  for (double r : roots) cuts.push_back(r);
  cuts.push_back(1.0);
  const double guard = 1e-9 / len;
  for (std::size_t b = 0; b + 1 < cuts.size(); ++b) {
    const double lo = cuts[b];
    const double hi = cuts[b + 1];
    if (hi - lo <= 2.0 * guard) continue;
    EquilibriumBranch br;
    br.loSingular = b > 0;
    br.hiSingular = b + 2 < cuts.size();
    br.sLo = report(lo);
    br.sHi = report(hi);
    if (br.loSingular) br.singularEndpoints.push_back(report(lo));
    if (br.hiSingular) br.singularEndpoints.push_back(report(hi));
    std::vector<double> samples;
    for (double s : grid) {
      const bool inside = br.loSingular ? s > lo + guard : s >= lo;
      const bool below = br.hiSingular ? s < hi - guard : s <= hi;
      if (inside && below) samples.push_back(s);
    }
    if (samples.empty()) samples.push_back(0.5 * (lo + hi));
    std::vector<EigenCounts> counts;
    for (double s : samples) {
      EquilibriumPoint p = solve_equilibrium(sys, path.at(s), true);
      counts.push_back(eigen_counts(eval_A(sys, p.u)));
      if (p.kind != EquilibriumKind::NoSolution) br.kalman.push_back(kalman_rank(sys, p.u, true));
      br.points.push_back(std::move(p));
    }
    br.counts = counts.front();
    const bool uniform = std::all_of(counts.begin(), counts.end(), [&](const EigenCounts& c) { return c == counts.front(); });
    br.stabilityType = uniform ? classify(br.counts, n) : StabilityType::Varying;
    br.kalmanAllOk = br.kalman.size() == br.points.size() &&
                     std::all_of(br.kalman.begin(), br.kalman.end(), [&](const KalmanRecord& k) { return k.rank == n; });
    for (std::size_t i = 0; i + 1 < br.points.size(); ++i) {
      const auto& p = br.points[i];
      const auto& q = br.points[i + 1];
      if (p.kind != EquilibriumKind::Unique || q.kind != EquilibriumKind::Unique) continue;
      const Vector du = q.u - p.u;
      double slope = 0.0;
      for (const auto* e : {&p, &q}) {
        Vector dA = sys.C() * du;
        for (int k = 0; k < sys.inputs(); ++k) dA += du[k] * sys.B()[static_cast<std::size_t>(k)] * e->x;
        slope = std::max(slope, eval_A(sys, e->u).partialPivLu().solve(dA).norm());
      }
      if ((q.x - p.x).norm() > 10.0 * slope + 1e-12) {
        std::ostringstream os;
        os << "gap between samples at " << report(samples[i]) << " and " << report(samples[i + 1]);
        br.continuityFlags.push_back(os.str());
      }
    }
    if (br.loSingular) br.unbounded.push_back(certify_unbounded(sys, path, lo, samples.front()));
    if (br.hiSingular) br.unbounded.push_back(certify_unbounded(sys, path, hi, samples.back()));
    trace.branches.push_back(std::move(br));
  }
  return trace;
}

RankScan rank_scan(const AffineSystem& sys, const std::vector<double>& uGrid) {
  if (sys.inputs() > 1) fail(ErrorKind::InvalidInput, "rank_scan over a scalar grid needs m <= 1");
  RankScan scan;
  bool previousFailed = false;
  for (double value : uGrid) {
    const Vector u = sys.inputs() == 1 ? Vector::Constant(1, value) : Vector(0);
    bool failed = false;
    try {
      failed = kalman_rank(sys, u, true).rank < sys.dim();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PreconditionFailed) throw;
      scan.undefined.push_back(value);
      previousFailed = false;
      continue;
    }
    if (failed) {
      scan.failing.push_back(value);
      if (previousFailed) {
        scan.clusters.back().second = value;
      } else {
        scan.clusters.emplace_back(value, value);
      }
    }
    previousFailed = failed;
  }
  return scan;
}

AroundVerdict control_set_around(const AffineSystem& sys, const EquilibriumBranch& branch,
                                 const std::optional<SketchOptions>& sketch) {
  AroundVerdict v;
  const int n = sys.dim();
  if (!branch.kalman.empty() && branch.kalmanAllOk) {
    v.containsControlSet = true;
    v.undecided = false;
    v.notes.push_back("every sampled equilibrium passes the Kalman rank condition");
  } else {
    v.notes.push_back("some sampled equilibria fail the Kalman rank condition or are not unique");
  }
  if (v.containsControlSet) {
    for (const auto& cert : branch.unbounded) {
      if (cert.certified) v.certificates.push_back(cert);
    }
    v.unbounded = !v.certificates.empty();
  }
  for (std::size_t i = 0; i < branch.points.size(); ++i) {
    const auto& p = branch.points[i];
    const bool ok = i < branch.kalman.size() && branch.kalman[i].rank == n && p.kind == EquilibriumKind::Unique;
    if (!ok) continue;
    const EigenCounts c = eigen_counts(eval_A(sys, p.u));
    if (c.negRe == n) v.globalReachMinus = true;
    if (c.posRe == n) v.globalReachPlus = true;
  }
  std::optional<EigenCounts> first;
  bool uniform = true;
  int inOmega = 0;
  for (const auto& p : branch.points) {
    if (!sys.omega().contains(p.u)) continue;
    ++inOmega;
    const EigenCounts c = eigen_counts(eval_A(sys, p.u));
    if (!first) first = c;
    uniform = uniform && c == *first && c.marginal == 0;
  }
  v.uniformlyHyperbolic = inOmega > 0 && uniform;
  if (v.uniformlyHyperbolic) {
    std::ostringstream os;
    os << "uniformly hyperbolic on the sampled controls in the control range: " << first->negRe
       << " eigenvalues with negative and " << first->posRe << " with positive real part";
    v.notes.push_back(os.str());
  }
  if (v.globalReachMinus) v.notes.push_back("some A(u) is stable: the negative orbit of x_u is the whole space");
  if (v.globalReachPlus) v.notes.push_back("some A(u) is totally unstable: the positive orbit of x_u is the whole space");
  if (sketch && n == 2 && sys.inputs() <= 2) {
    const CellGrid grid = CellGrid::box(sketch->lower, sketch->upper, {sketch->cellsPerAxis, sketch->cellsPerAxis});
    const TransitionGraph g = build_graph(sys, grid, sys.omega().grid_sample(), sketch->tau);
    for (auto& cs : find_control_sets(g)) {
      const bool hit = std::any_of(branch.points.begin(), branch.points.end(), [&](const EquilibriumPoint& p) {
        return p.kind == EquilibriumKind::Unique && sys.omega().contains(p.u) && cs.contains(grid.locate(p.x));
      });
      if (hit) v.sketch.push_back(std::move(cs));
    }
  }
  return v;
}

}  // namespace conset
