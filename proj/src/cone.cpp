#include "conset/cone.hpp"

#include "conset/error.hpp"

#include <cmath>

namespace conset {

namespace {

constexpr double kCertificateTol = 1e-6;

}  // namespace

const char* to_string(LiftVerdict v) {
  switch (v) {
    case LiftVerdict::ConeControlSet: return "ConeControlSet";
    case LiftVerdict::NotAControlSet: return "NotAControlSet";
    case LiftVerdict::Undecided: return "Undecided";
  }
  return "?";
}

LiftResult lift_cone(const AffineSystem& sys, const ControlSetResult& cs, const std::optional<SpectralEstimate>& spectral) {
  if (!spectral || spectral->samples.empty()) fail(ErrorKind::PreconditionFailed, "lift_cone needs spectral data");
  if (cs.manifold != Manifold::Circle || !cs.hasInterior) {
    fail(ErrorKind::PreconditionFailed, "lift_cone needs a circle control set with interior");
  }
  LiftResult out;
  switch (spectral->containsZeroInterior) {
    case TriState::No:
      out.verdict = LiftVerdict::NotAControlSet;
      out.note = "0 is outside the Floquet spectrum estimate; the cone is not a control set";
      return out;
    case TriState::Boundary:
      out.verdict = LiftVerdict::Undecided;
      out.note = "0 lies on the boundary of the Floquet spectrum estimate";
      return out;
    case TriState::Yes: break;
  }
  ScalingPair pair;
  try {
    pair = scaling_pair_search(sys, cs, *spectral);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoScalingPair) throw;
    out.verdict = LiftVerdict::Undecided;
    out.note = std::string("0 is inside the spectrum estimate but no certificate: ") + e.what();
    return out;
  }
  const auto& c = pair.certificate;
  if (!(c.alphaPlus > 1.0 && c.alphaMinus > 0.0 && c.alphaMinus < 1.0) || !(c.residualPlus <= kCertificateTol) ||
      !(c.residualMinus <= kCertificateTol)) {
    out.verdict = LiftVerdict::Undecided;
    out.note = "scaling pair found but its flow residuals exceed 1e-6";
    return out;
  }
  ControlSetResult cone = cs;
  cone.certificate = c;
  out.verdict = LiftVerdict::ConeControlSet;
  out.cone = std::move(cone);
  out.note = cs.invariant ? "invariant cone control set" : "cone control set";
  return out;
}

ReachDemo diophantine_reach_demo(const ConeLiftCertificate& cert, const Vector& beta, double alpha1, double eps,
                                 std::int64_t maxEll) {
  if (!(cert.alphaPlus > 1.0) || !(cert.alphaMinus > 0.0 && cert.alphaMinus < 1.0)) {
    fail(ErrorKind::PreconditionFailed, "need alpha+ > 1 > alpha- > 0");
  }
  if (beta.size() == 0 || (beta.array() <= 0.0).any()) fail(ErrorKind::InvalidInput, "beta must be positive");
  if (!(alpha1 > 0.0) || !(eps > 0.0)) fail(ErrorKind::InvalidInput, "need alpha1 > 0 and eps > 0");
  const double prod = beta.prod();
  DioQuery q;
  q.a = cert.alphaPlus;
  q.b = 1.0 / cert.alphaMinus;
  q.c = alpha1 / prod;
  q.eps = eps / prod;
  q.maxEll = maxEll;
  const DioResult r = solve(q);
  const double radius =
      prod * std::exp(static_cast<double>(r.k) * std::log(q.a) - static_cast<double>(r.ell) * std::log(q.b));
  return {r.k, r.ell, radius};
}

}  // namespace conset
