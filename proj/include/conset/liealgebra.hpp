#pragma once

#include "conset/dynamics.hpp"
#include "conset/model.hpp"

#include <vector>

namespace conset {

struct LieBasis {
  std::vector<Matrix> generators;
  int depth = 0;
  /// Orthonormal in the Frobenius inner product.
  std::vector<Matrix> span;
  bool saturated = false;
};

Matrix bracket(const Matrix& M1, const Matrix& M2);

LieBasis generate_lie_algebra(const AffineSystem& sys, int maxDepth);

/// Rank of {Ms − (sᵀMs)s : M ∈ span}; accessibility on the sphere at s iff n − 1.
int rank_at_sphere(const LieBasis& basis, const SphereState& s);

struct ArcPoint {
  Vector point;
  int projectiveRank = 0;
  int sphereRank = 0;
  bool marginal = false;
};

struct ArcReport {
  int dim = 0;
  std::vector<ArcPoint> points;
  std::vector<ArcPoint> failures;
  /// Every point passing the projective check also passes the sphere check.
  bool transferHolds = true;
  bool anyMarginal = false;
};

/// Projective rank in the affine chart x_i = 1 where |s_i| is largest.
int rank_at_projective(const LieBasis& basis, const SphereState& s, bool* marginal = nullptr);

ArcReport check_arc_projective(const LieBasis& basis, const std::vector<SphereState>& samples);

/// n evenly spaced circle points (n = 2) or a seeded uniform sample otherwise.
std::vector<SphereState> sphere_samples(int dim, int count, unsigned long long seed);

}  // namespace conset
