#include "conset/diophantine.hpp"

#include "conset/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace conset {

namespace {

constexpr std::int64_t kMaxDenominator = 1000000;

std::optional<DioResult> best_k(const DioQuery& q, double la, double lb, double lc, std::int64_t ell) {
  const double t = (static_cast<double>(ell) * lb + lc) / la;
  std::array<double, 3> candidates = {std::floor(t), std::ceil(t), 0.0};
  std::optional<DioResult> best;
  for (double kd : candidates) {
    kd = std::max(kd, 0.0);
    const auto k = static_cast<std::int64_t>(kd);
    if (k == 0 && ell == 0) continue;
    const double delta = static_cast<double>(k) * la - static_cast<double>(ell) * lb - lc;
    const double residual = q.c * std::abs(std::expm1(delta));
    if (!(residual < q.eps)) continue;
    if (!best || residual < best->residual) best = DioResult{k, ell, residual};
  }
  return best;
}

void validate(const DioQuery& q) {
  if (!(q.a > 1.0) || !(q.b > 1.0) || !std::isfinite(q.a) || !std::isfinite(q.b)) {
    fail(ErrorKind::InvalidInput, "need a, b > 1");
  }
  if (!(q.c > 0.0) || !std::isfinite(q.c)) fail(ErrorKind::InvalidInput, "need c > 0");
  if (!(q.eps > 0.0)) fail(ErrorKind::InvalidInput, "need eps > 0");
  if (q.maxEll < 0) fail(ErrorKind::InvalidInput, "need maxEll >= 0");
}

}  // namespace

std::optional<std::pair<std::int64_t, std::int64_t>> is_log_ratio_rational(double a, double b, double tol) {
  if (!(a > 1.0) || !(b > 1.0)) fail(ErrorKind::InvalidInput, "need a, b > 1");
  const double x = std::log(b) / std::log(a);
  const double bound = tol * std::max(1.0, std::abs(x));
  std::int64_t h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  double r = x;
  for (int i = 0; i < 64; ++i) {
    const double fl = std::floor(r);
    const auto ai = static_cast<std::int64_t>(fl);
    const std::int64_t h = ai * h1 + h2;
    const std::int64_t k = ai * k1 + k2;
    if (k > kMaxDenominator) break;
    if (std::abs(x - static_cast<double>(h) / static_cast<double>(k)) < bound) return std::make_pair(h, k);
    const double frac = r - fl;
    if (frac <= 0.0) break;
    r = 1.0 / frac;
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
  }
  return std::nullopt;
}

DioResult solve(const DioQuery& q) {
  validate(q);
  const double la = std::log(q.a);
  const double lb = std::log(q.b);
  const double lc = std::log(q.c);
  std::int64_t limit = q.maxEll;
  const auto rational = is_log_ratio_rational(q.a, q.b);
  if (rational) {
    const auto start = static_cast<std::int64_t>(std::max(0.0, std::ceil(-lc / lb)));
    limit = std::min(limit, start + rational->second);
  }
  for (std::int64_t ell = 0; ell <= limit; ++ell) {
    if (auto hit = best_k(q, la, lb, lc, ell)) return *hit;
  }
  if (rational) {
    fail(ErrorKind::RationalRatio, "log b / log a is rational (" + std::to_string(rational->first) + "/" +
                                       std::to_string(rational->second) + ") and no exact solution exists");
  }
  fail(ErrorKind::BudgetExhausted, "no (k, l) with l <= " + std::to_string(q.maxEll));
}

ScalingPair scaling_pair_search(const AffineSystem& sys, const ControlSetResult& cs,
                                const SpectralEstimate& spectral) {
  const SpectralSample* plus = nullptr;
  const SpectralSample* minus = nullptr;
  auto better = [](const SpectralSample* cur, const SpectralSample& s, bool positive) {
    if (!cur) return true;
    if (cur->constantControl != s.constantControl) return s.constantControl;
    return positive ? s.exponent > cur->exponent : s.exponent < cur->exponent;
  };
  for (const auto& s : spectral.samples) {
    if (!std::binary_search(cs.interiorCells.begin(), cs.interiorCells.end(), s.cell)) continue;
    if (s.exponent > 0.0 && better(plus, s, true)) plus = &s;
    if (s.exponent < 0.0 && better(minus, s, false)) minus = &s;
  }
  if (!plus || !minus) fail(ErrorKind::NoScalingPair, "no positive and negative exponent pair in interior cells");

  static constexpr std::array<double, 6> kIrrational = {1.4142135623730951, 1.7320508075688772, 1.618033988749895,
                                                         2.2360679774997896, 1.3591409142295225, 1.0471975511965976};
  auto sigma_of = [](const SpectralSample& s, int variant, bool scaleFree) {
    if (!s.constantControl) return s.period * (1 + variant);
    const double base = 1.0 / std::abs(s.exponent);
    return scaleFree ? base : base * kIrrational[static_cast<std::size_t>(variant) % kIrrational.size()];
  };
  double sigmaPlus = sigma_of(*plus, 0, true);
  double sigmaMinus = 0.0;
  bool found = false;
  for (int variant = 0; variant < 36 && !found; ++variant) {
    const int vp = plus->constantControl ? 0 : variant / 6;
    const int vm = variant % 6;
    sigmaPlus = sigma_of(*plus, vp, true);
    sigmaMinus = sigma_of(*minus, vm, false);
    const double ap = std::exp(plus->exponent * sigmaPlus);
    const double am = std::exp(minus->exponent * sigmaMinus);
    found = !is_log_ratio_rational(ap, 1.0 / am).has_value();
  }
  if (!found) fail(ErrorKind::NoScalingPair, "every candidate scaling pair has a rational log ratio");

  auto build = [&](const SpectralSample& s, double sigma, Vector& point, ControlSignal& u, double& alpha,
                   double& residual) {
    point = s.point;
    u = s.constantControl ? ControlSignal::constant(s.control.segments().front().value, sigma)
                          : s.control.repeated(static_cast<int>(std::lround(sigma / s.period)));
    alpha = std::exp(s.exponent * sigma);
    residual = (flow(sys, point, u, sigma).x - alpha * point).norm();
  };
  ScalingPair pair;
  auto& c = pair.certificate;
  build(*plus, sigmaPlus, c.sPlus, c.uPlus, c.alphaPlus, c.residualPlus);
  build(*minus, sigmaMinus, c.sMinus, c.uMinus, c.alphaMinus, c.residualMinus);
  c.sigmaPlus = sigmaPlus;
  c.sigmaMinus = sigmaMinus;
  pair.alphaPlus = c.alphaPlus;
  pair.alphaMinus = c.alphaMinus;
  return pair;
}

}  // namespace conset
