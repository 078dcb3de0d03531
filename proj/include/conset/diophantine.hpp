#pragma once

#include "conset/spectrum.hpp"

#include <cstdint>
#include <optional>
#include <utility>

namespace conset {

struct DioQuery {
  double a = 2.0;
  double b = 3.0;
  double c = 1.0;
  double eps = 1e-2;
  std::int64_t maxEll = 100000;
};

struct DioResult {
  std::int64_t k = 0;
  std::int64_t ell = 0;
  /// |a^k b^{−ℓ} − c|
  double residual = 0.0;
};

/// Convergent p/q of x = log b / log a with |x − p/q| < tol · max(1, |x|) and
/// q ≤ 10⁶, if any.
std::optional<std::pair<std::int64_t, std::int64_t>> is_log_ratio_rational(double a, double b, double tol = 1e-14);

/// Smallest ℓ, then the nearest k, with |a^k b^{−ℓ} − c| < eps over
/// (k, ℓ) ∈ ℕ₀² without (0, 0). Powers are compared in log space.
DioResult solve(const DioQuery& q);

struct ScalingPair {
  double alphaPlus = 0.0;
  double alphaMinus = 0.0;
  ConeLiftCertificate certificate;
};

/// Picks the largest positive and smallest negative exponent samples in
/// interior cells of cs and scales their periods so that the log ratio of the
/// resulting α± passes the irrationality screen.
ScalingPair scaling_pair_search(const AffineSystem& sys, const ControlSetResult& cs,
                                const SpectralEstimate& spectral);

}  // namespace conset
