#include "conset/liealgebra.hpp"

#include "conset/error.hpp"
#include "conset/linalg.hpp"

#include <cmath>
#include <random>

namespace conset {

namespace {

constexpr double kResidualTol = 1e-10;
constexpr double kFieldFloor = 1e-10;

// Adds M to the orthonormal set if its residual is significant.
bool absorb(std::vector<Matrix>& span, Matrix M, double scale) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& E : span) M -= (E.array() * M.array()).sum() * E;
  }
  const double r = M.norm();
  if (r <= kResidualTol * std::max(scale, 1.0)) return false;
  span.push_back(M / r);
  return true;
}

int tangent_rank(const Matrix& vectors, bool* marginal) {
  const RankInfo info = numerical_rank(vectors, 1e-9, kFieldFloor);
  if (marginal) *marginal = info.marginal;
  return info.rank;
}

}  // namespace

Matrix bracket(const Matrix& M1, const Matrix& M2) {
  if (M1.rows() != M1.cols() || M1.rows() != M2.rows() || M1.cols() != M2.cols()) {
    fail(ErrorKind::InvalidInput, "bracket needs square matrices of equal size");
  }
  return M1 * M2 - M2 * M1;
}

LieBasis generate_lie_algebra(const AffineSystem& sys, int maxDepth) {
  if (maxDepth < 1) fail(ErrorKind::InvalidInput, "maxDepth must be at least 1");
  LieBasis basis;
  basis.generators.push_back(sys.A());
  for (const auto& Bi : sys.B()) basis.generators.push_back(Bi);
  for (const auto& G : basis.generators) absorb(basis.span, G, G.norm());
  basis.depth = 1;
  const auto full = static_cast<std::size_t>(sys.dim() * sys.dim());
  while (true) {
    std::vector<Matrix> grown = basis.span;
    if (basis.span.size() < full) {
      for (std::size_t i = 0; i < basis.span.size(); ++i) {
        for (std::size_t j = i + 1; j < basis.span.size(); ++j) {
          absorb(grown, bracket(basis.span[i], basis.span[j]), 1.0);
        }
      }
    }
    if (grown.size() == basis.span.size()) {
      basis.saturated = true;
      break;
    }
    if (basis.depth >= maxDepth) break;
    basis.span = std::move(grown);
    ++basis.depth;
  }
  return basis;
}

int rank_at_sphere(const LieBasis& basis, const SphereState& s) {
  const auto n = s.dim();
  if (basis.span.empty()) return 0;
  Matrix fields(n, static_cast<Eigen::Index>(basis.span.size()));
  for (std::size_t k = 0; k < basis.span.size(); ++k) {
    const Vector Ms = basis.span[k] * s.vec();
    fields.col(static_cast<Eigen::Index>(k)) = Ms - s.vec().dot(Ms) * s.vec();
  }
  return tangent_rank(fields, nullptr);
}

int rank_at_projective(const LieBasis& basis, const SphereState& s, bool* marginal) {
  const auto n = s.dim();
  if (marginal) *marginal = false;
  if (basis.span.empty() || n < 2) return 0;
  Eigen::Index i = 0;
  s.vec().cwiseAbs().maxCoeff(&i);
  const Vector x = s.vec() / s.vec()[i];
  Matrix fields(n - 1, static_cast<Eigen::Index>(basis.span.size()));
  for (std::size_t k = 0; k < basis.span.size(); ++k) {
    const Vector Mx = basis.span[k] * x;
    const Vector v = Mx - Mx[i] * x;
    Eigen::Index row = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) fields(row++, static_cast<Eigen::Index>(k)) = v[j];
    }
  }
  return tangent_rank(fields, marginal);
}

ArcReport check_arc_projective(const LieBasis& basis, const std::vector<SphereState>& samples) {
  if (samples.empty()) fail(ErrorKind::InvalidInput, "check_arc_projective needs samples");
  ArcReport report;
  report.dim = samples.front().dim();
  for (const auto& s : samples) {
    ArcPoint p;
    p.point = s.vec();
    p.projectiveRank = rank_at_projective(basis, s, &p.marginal);
    p.sphereRank = rank_at_sphere(basis, s);
    const bool projOk = p.projectiveRank == report.dim - 1;
    if (projOk && p.sphereRank != report.dim - 1) report.transferHolds = false;
    if (!projOk) report.failures.push_back(p);
    report.anyMarginal = report.anyMarginal || p.marginal;
    report.points.push_back(std::move(p));
  }
  return report;
}

std::vector<SphereState> sphere_samples(int dim, int count, unsigned long long seed) {
  std::vector<SphereState> out;
  if (dim == 2) {
    for (int k = 0; k < count; ++k) out.push_back(SphereState::from_angle(2.0 * M_PI * k / count));
    return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  while (static_cast<int>(out.size()) < count) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
    if (v.norm() > 1e-6) out.emplace_back(v);
  }
  return out;
}

}  // namespace conset
