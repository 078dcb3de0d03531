#include "conset/linalg.hpp"

#include "conset/error.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>

namespace conset {

namespace {

constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

const double* pade_coefficients(int m) {
  static constexpr double c3[] = {120.0, 60.0, 12.0, 1.0};
  static constexpr double c5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr double c7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                  25200.0,    1512.0,    56.0,      1.0};
  static constexpr double c9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                  2162160.0,     110880.0,     3960.0,       90.0,        1.0};
  switch (m) {
    case 3: return c3;
    case 5: return c5;
    case 7: return c7;
    case 9: return c9;
    default: return kPade13.data();
  }
}

Matrix pade_low(const Matrix& A, int m) {
  const double* c = pade_coefficients(m);
  const auto n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix A2 = A * A;
  Matrix power = I;
  Matrix U = Matrix::Zero(n, n);
  Matrix V = Matrix::Zero(n, n);
  for (int k = 0; k <= m; k += 2) {
    V += c[k] * power;
    U += c[k + 1] * power;
    power = power * A2;
  }
  U = A * U;
  return (V - U).partialPivLu().solve(V + U);
}

Matrix pade13(const Matrix& A) {
  const auto& b = kPade13;
  const auto n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix A2 = A * A;
  const Matrix A4 = A2 * A2;
  const Matrix A6 = A4 * A2;
  const Matrix U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  const Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
  return (V - U).partialPivLu().solve(V + U);
}

}  // namespace

double norm1(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().colwise().sum().maxCoeff();
}

Matrix expm(const Matrix& M) {
  if (M.rows() != M.cols()) fail(ErrorKind::InvalidInput, "expm needs a square matrix");
  if (!M.allFinite()) fail(ErrorKind::NumericalFailure, "expm: non-finite input");
  const double nrm = norm1(M);
  static constexpr std::array<std::pair<int, double>, 4> kLow = {
      {{3, 1.495585217958292e-2}, {5, 2.539398330063230e-1}, {7, 9.504178996162932e-1}, {9, 2.097847961257068e0}}};
  for (const auto& [m, theta] : kLow) {
    if (nrm <= theta) return pade_low(M, m);
  }
  constexpr double theta13 = 5.371920351148152;
  int s = 0;
  if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
  Matrix E = pade13(M / std::ldexp(1.0, s));
  for (int i = 0; i < s; ++i) E = E * E;
  if (!E.allFinite()) fail(ErrorKind::NumericalFailure, "expm overflow");
  return E;
}

AffineStep affine_step(const Matrix& M, const Vector& b, double t) {
  const auto n = M.rows();
  Matrix aug = Matrix::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = M * t;
  aug.topRightCorner(n, 1) = b * t;
  const Matrix E = expm(aug);
  return {E.topLeftCorner(n, n), E.topRightCorner(n, 1)};
}

RankInfo numerical_rank(const Matrix& M, double rel, double absFloor) {
  RankInfo info;
  if (M.size() == 0) return info;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  info.singular.assign(sv.data(), sv.data() + sv.size());
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  info.cutoff = std::max(rel * smax, absFloor);
  for (double s : info.singular) {
    if (s > info.cutoff) ++info.rank;
    if (s > info.cutoff / 10.0 && s < info.cutoff * 10.0) info.marginal = true;
  }
  return info;
}

Matrix null_space(const Matrix& M, double rel) {
  const auto n = M.cols();
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  const double cutoff = std::max(rel * smax, 1e-300);
  Eigen::Index r = 0;
  while (r < sv.size() && sv[r] > cutoff) ++r;
  return svd.matrixV().rightCols(n - r);
}

}  // namespace conset
