#pragma once

#include "conset/model.hpp"

#include <vector>

namespace conset {

/// e^M by scaling and squaring with a diagonal Padé approximant of degree
/// 3, 5, 7, 9 or 13, chosen from the 1-norm of M.
Matrix expm(const Matrix& M);

/// The pair (e^{Mt}, ∫₀ᵗ e^{Ms} ds · b), read off one augmented exponential.
struct AffineStep {
  Matrix E;
  Vector w;
};
AffineStep affine_step(const Matrix& M, const Vector& b, double t);

struct RankInfo {
  int rank = 0;
  bool marginal = false;
  double cutoff = 0.0;
  std::vector<double> singular;
};

/// Numerical rank with cutoff max(rel · σ_max, absFloor). A decision is
/// marginal when some singular value lies within a factor 10 of the cutoff.
RankInfo numerical_rank(const Matrix& M, double rel = 1e-9, double absFloor = 1e-300);

/// Orthonormal basis of the numerical null space (columns).
Matrix null_space(const Matrix& M, double rel = 1e-9);

/// Matrix 1-norm (maximum absolute column sum).
double norm1(const Matrix& M);

}  // namespace conset
