#include "conset/model.hpp"

#include "conset/error.hpp"

#include <cmath>
#include <sstream>

namespace conset {

namespace {

void require_dim(const Vector& u, int m, const char* what) {
  if (u.size() != m) {
    std::ostringstream os;
    os << what << ": expected control of length " << m << ", got " << u.size();
    fail(ErrorKind::InvalidInput, os.str());
  }
}

bool all_finite(const Matrix& M) { return M.allFinite(); }

}  // namespace

const char* to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::HomogeneousBilinear: return "HomogeneousBilinear";
    case SystemKind::InhomogeneousBilinear: return "InhomogeneousBilinear";
    case SystemKind::Affine: return "Affine";
  }
  return "?";
}

ControlRange ControlRange::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) fail(ErrorKind::InvalidInput, "box bounds differ in length");
  if (!lower.allFinite() || !upper.allFinite()) fail(ErrorKind::InvalidInput, "box bounds must be finite");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) fail(ErrorKind::InvalidInput, "box lower bound exceeds upper bound");
  }
  return ControlRange(Box{std::move(lower), std::move(upper)});
}

ControlRange ControlRange::interval(double lower, double upper) {
  return box(Vector::Constant(1, lower), Vector::Constant(1, upper));
}

ControlRange ControlRange::finite_set(std::vector<Vector> points) {
  if (points.empty()) fail(ErrorKind::InvalidInput, "finite control set is empty");
  for (const auto& p : points) {
    if (p.size() != points.front().size()) fail(ErrorKind::InvalidInput, "finite control set has mixed lengths");
    if (!p.allFinite()) fail(ErrorKind::InvalidInput, "finite control set has non-finite entries");
  }
  return ControlRange(FiniteSet{std::move(points)});
}

ControlRange ControlRange::none() { return ControlRange(Box{Vector(0), Vector(0)}); }

int ControlRange::dim() const {
  if (const auto* b = std::get_if<Box>(&range_)) return static_cast<int>(b->lower.size());
  return static_cast<int>(std::get<FiniteSet>(range_).points.front().size());
}

const ControlRange::Box& ControlRange::as_box() const {
  if (!is_box()) fail(ErrorKind::InvalidInput, "control range is not a box");
  return std::get<Box>(range_);
}

const ControlRange::FiniteSet& ControlRange::as_set() const {
  if (is_box()) fail(ErrorKind::InvalidInput, "control range is not a finite set");
  return std::get<FiniteSet>(range_);
}

bool ControlRange::contains(const Vector& u) const {
  if (u.size() != dim()) return false;
  if (const auto* b = std::get_if<Box>(&range_)) {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (!(b->lower[i] <= u[i] && u[i] <= b->upper[i])) return false;
    }
    return true;
  }
  for (const auto& p : std::get<FiniteSet>(range_).points) {
    if (p == u) return true;
  }
  return false;
}

ControlRange ControlRange::shifted(const Vector& offset) const {
  require_dim(offset, dim(), "ControlRange::shifted");
  if (const auto* b = std::get_if<Box>(&range_)) return box(b->lower - offset, b->upper - offset);
  std::vector<Vector> pts;
  for (const auto& p : std::get<FiniteSet>(range_).points) pts.push_back(p - offset);
  return finite_set(std::move(pts));
}

std::vector<Vector> ControlRange::grid_sample() const {
  if (!is_box()) return std::get<FiniteSet>(range_).points;
  const auto& b = std::get<Box>(range_);
  const int m = dim();
  std::vector<Vector> out;
  int total = 1;
  for (int i = 0; i < m; ++i) total *= 3;
  for (int idx = 0; idx < total; ++idx) {
    Vector u(m);
    int rest = idx;
    for (int i = m - 1; i >= 0; --i) {
      const int level = rest % 3;
      rest /= 3;
      u[i] = level == 0 ? b.lower[i] : level == 2 ? b.upper[i] : 0.5 * (b.lower[i] + b.upper[i]);
    }
    out.push_back(std::move(u));
  }
  return out;
}

bool ControlRange::operator==(const ControlRange& other) const {
  if (is_box() != other.is_box()) return false;
  if (is_box()) {
    const auto& a = std::get<Box>(range_);
    const auto& b = std::get<Box>(other.range_);
    return a.lower.size() == b.lower.size() && a.lower == b.lower && a.upper == b.upper;
  }
  const auto& a = std::get<FiniteSet>(range_).points;
  const auto& b = std::get<FiniteSet>(other.range_).points;
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size() || a[i] != b[i]) return false;
  }
  return true;
}

AffineSystem::AffineSystem(Matrix A, std::vector<Matrix> B, Matrix C, Vector d, ControlRange omega)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), d_(std::move(d)), omega_(std::move(omega)) {
  const auto n = A_.rows();
  if (n < 1 || A_.cols() != n) fail(ErrorKind::InvalidInput, "A must be a nonempty square matrix");
  const auto m = static_cast<Eigen::Index>(B_.size());
  for (const auto& Bi : B_) {
    if (Bi.rows() != n || Bi.cols() != n) fail(ErrorKind::InvalidInput, "every B_i must be n x n");
    if (!all_finite(Bi)) fail(ErrorKind::InvalidInput, "B_i has non-finite entries");
  }
  if (C_.size() == 0) C_ = Matrix::Zero(n, m);
  if (C_.rows() != n || C_.cols() != m) fail(ErrorKind::InvalidInput, "C must be n x m with m = |B|");
  if (d_.size() == 0) d_ = Vector::Zero(n);
  if (d_.size() != n) fail(ErrorKind::InvalidInput, "d must have length n");
  if (!all_finite(A_) || !all_finite(C_) || !d_.allFinite()) {
    fail(ErrorKind::InvalidInput, "system has non-finite entries");
  }
  if (omega_.dim() != m) fail(ErrorKind::InvalidInput, "control range dimension differs from |B|");
}

AffineSystem AffineSystem::homogeneous(Matrix A, std::vector<Matrix> B, ControlRange omega) {
  const auto n = A.rows();
  const auto m = static_cast<Eigen::Index>(B.size());
  return AffineSystem(std::move(A), std::move(B), Matrix::Zero(n, m), Vector::Zero(n), std::move(omega));
}

SystemKind AffineSystem::kind() const {
  const bool cZero = (C_.array() == 0.0).all();
  const bool dZero = (d_.array() == 0.0).all();
  if (cZero && dZero) return SystemKind::HomogeneousBilinear;
  if (dZero) return SystemKind::InhomogeneousBilinear;
  return SystemKind::Affine;
}

bool AffineSystem::operator==(const AffineSystem& other) const {
  if (dim() != other.dim() || inputs() != other.inputs()) return false;
  if (A_ != other.A_ || C_ != other.C_ || d_ != other.d_) return false;
  for (std::size_t i = 0; i < B_.size(); ++i) {
    if (B_[i] != other.B_[i]) return false;
  }
  return omega_ == other.omega_;
}

Matrix eval_A(const AffineSystem& sys, const Vector& u) {
  require_dim(u, sys.inputs(), "eval_A");
  Matrix M = sys.A();
  for (int i = 0; i < sys.inputs(); ++i) M += u[i] * sys.B()[i];
  return M;
}

Vector eval_rhs(const AffineSystem& sys, const Vector& x, const Vector& u) {
  require_dim(u, sys.inputs(), "eval_rhs");
  if (x.size() != sys.dim()) fail(ErrorKind::InvalidInput, "eval_rhs: state length differs from n");
  return eval_A(sys, u) * x + sys.C() * u + sys.d();
}

AffineSystem time_reverse(const AffineSystem& sys) {
  std::vector<Matrix> B;
  for (const auto& Bi : sys.B()) B.push_back(-Bi);
  return AffineSystem(-sys.A(), std::move(B), -sys.C(), -sys.d(), sys.omega());
}

AffineSystem homogenize_shift(const AffineSystem& sys, const Vector& u0) {
  require_dim(u0, sys.inputs(), "homogenize_shift");
  const double residual = (sys.C() * u0 + sys.d()).norm();
  if (!(residual <= 1e-12)) {
    std::ostringstream os;
    os << "C u0 + d does not vanish (residual " << residual << ")";
    throw ResidualError(os.str(), residual);
  }
  if (!sys.omega().contains(u0)) fail(ErrorKind::PreconditionFailed, "u0 is not in the control range");
  return AffineSystem(eval_A(sys, u0), sys.B(), sys.C(), Vector::Zero(sys.dim()), sys.omega().shifted(u0));
}

bool Segment::operator==(const Segment& other) const {
  return duration == other.duration && value.size() == other.value.size() && value == other.value;
}

ControlSignal::ControlSignal(std::vector<Segment> segments) {
  for (auto& seg : segments) {
    if (!std::isfinite(seg.duration) || seg.duration < 0.0) {
      fail(ErrorKind::InvalidInput, "segment durations must be finite and nonnegative");
    }
    if (!seg.value.allFinite()) fail(ErrorKind::InvalidInput, "segment value has non-finite entries");
    if (!segments_.empty() && seg.value.size() != segments_.front().value.size()) {
      fail(ErrorKind::InvalidInput, "segment values differ in length");
    }
    if (seg.duration == 0.0) continue;
    if (!segments_.empty() && segments_.back().value == seg.value) {
      segments_.back().duration += seg.duration;
    } else {
      segments_.push_back(std::move(seg));
    }
  }
}

ControlSignal ControlSignal::constant(Vector value, double duration) {
  return ControlSignal({Segment{duration, std::move(value)}});
}

double ControlSignal::total_duration() const {
  double total = 0.0;
  for (const auto& seg : segments_) total += seg.duration;
  return total;
}

int ControlSignal::dim() const {
  return segments_.empty() ? 0 : static_cast<int>(segments_.front().value.size());
}

ControlSignal ControlSignal::then(const ControlSignal& other) const {
  std::vector<Segment> all = segments_;
  all.insert(all.end(), other.segments_.begin(), other.segments_.end());
  return ControlSignal(std::move(all));
}

ControlSignal ControlSignal::shifted(double t) const {
  if (!(t >= 0.0)) fail(ErrorKind::InvalidInput, "shift must be nonnegative");
  if (segments_.empty()) return {};
  std::vector<Segment> out;
  double start = 0.0;
  for (const auto& seg : segments_) {
    const double end = start + seg.duration;
    if (end > t) out.push_back(Segment{end - std::max(start, t), seg.value});
    start = end;
  }
  if (out.empty()) out.push_back(Segment{1.0, segments_.back().value});
  return ControlSignal(std::move(out));
}

ControlSignal ControlSignal::reversed() const {
  return ControlSignal(std::vector<Segment>(segments_.rbegin(), segments_.rend()));
}

ControlSignal ControlSignal::repeated(int times) const {
  std::vector<Segment> out;
  for (int i = 0; i < times; ++i) out.insert(out.end(), segments_.begin(), segments_.end());
  return ControlSignal(std::move(out));
}

Vector ControlSignal::value_at(double t) const {
  if (segments_.empty()) fail(ErrorKind::InvalidInput, "empty control signal has no value");
  double start = 0.0;
  for (const auto& seg : segments_) {
    start += seg.duration;
    if (t < start) return seg.value;
  }
  return segments_.back().value;
}

void ControlSignal::validate(const ControlRange& omega) const {
  for (const auto& seg : segments_) {
    if (!omega.contains(seg.value)) fail(ErrorKind::InvalidInput, "control value outside the control range");
  }
}

}  // namespace conset
