#include "conset/io.hpp"

#include <fstream>
#include <sstream>

namespace conset {

using nlohmann::json;

namespace {

[[noreturn]] void shape_error(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what, 0, 0, path);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) shape_error(path, "expected a number");
  return j.get<double>();
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

json to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const ControlRange& omega) {
  if (omega.is_box()) {
    return {{"box", {{"lower", to_json(omega.as_box().lower)}, {"upper", to_json(omega.as_box().upper)}}}};
  }
  json pts = json::array();
  for (const auto& p : omega.as_set().points) pts.push_back(to_json(p));
  return {{"set", pts}};
}

json to_json(const AffineSystem& sys) {
  json B = json::array();
  for (const auto& Bi : sys.B()) B.push_back(to_json(Bi));
  return {{"schema", 1},         {"dim", sys.dim()},   {"A", to_json(sys.A())}, {"B", B},
          {"C", to_json(sys.C())}, {"d", to_json(sys.d())}, {"omega", to_json(sys.omega())}};
}

Vector vector_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) shape_error(path, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], path + "/" + std::to_string(i));
  return v;
}

Matrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) shape_error(path, "expected an array of rows");
  if (j.empty()) return Matrix(0, 0);
  std::size_t cols = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) shape_error(path + "/" + std::to_string(i), "expected a row array");
    if (i == 0) cols = j[i].size();
    if (j[i].size() != cols) shape_error(path + "/" + std::to_string(i), "ragged matrix rows");
  }
  Matrix M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    for (std::size_t k = 0; k < cols; ++k) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          number(j[i][k], path + "/" + std::to_string(i) + "/" + std::to_string(k));
    }
  }
  return M;
}

ControlRange control_range_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) shape_error(path, "expected {\"box\": ...} or {\"set\": ...}");
  try {
    if (j.contains("box")) {
      const auto& b = j.at("box");
      if (!b.is_object() || !b.contains("lower") || !b.contains("upper")) shape_error(path + "/box", "needs lower and upper");
      return ControlRange::box(vector_from_json(b.at("lower"), path + "/box/lower"),
                               vector_from_json(b.at("upper"), path + "/box/upper"));
    }
    if (j.contains("set")) {
      const auto& s = j.at("set");
      if (!s.is_array()) shape_error(path + "/set", "expected an array of points");
      std::vector<Vector> pts;
      for (std::size_t i = 0; i < s.size(); ++i) {
        pts.push_back(s[i].is_number() ? Vector::Constant(1, s[i].get<double>())
                                       : vector_from_json(s[i], path + "/set/" + std::to_string(i)));
      }
      return ControlRange::finite_set(std::move(pts));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    shape_error(path, e.what());
  }
  shape_error(path, "expected {\"box\": ...} or {\"set\": ...}");
}

AffineSystem system_from_json(const json& j) {
  if (!j.is_object()) shape_error("", "top level must be an object");
  if (j.contains("schema") && (!j.at("schema").is_number_integer() || j.at("schema").get<int>() != 1)) {
    shape_error("/schema", "unsupported schema version");
  }
  for (const char* key : {"dim", "A", "omega"}) {
    if (!j.contains(key)) shape_error(std::string("/") + key, "missing");
  }
  if (!j.at("dim").is_number_integer() || j.at("dim").get<int>() < 1) shape_error("/dim", "expected a positive integer");
  const int n = j.at("dim").get<int>();
  Matrix A = matrix_from_json(j.at("A"), "/A");
  if (A.rows() != n || A.cols() != n) shape_error("/A", "expected an n x n matrix");
  std::vector<Matrix> B;
  if (j.contains("B")) {
    if (!j.at("B").is_array()) shape_error("/B", "expected an array of matrices");
    for (std::size_t i = 0; i < j.at("B").size(); ++i) {
      const std::string path = "/B/" + std::to_string(i);
      Matrix Bi = matrix_from_json(j.at("B")[i], path);
      if (Bi.rows() != n || Bi.cols() != n) shape_error(path, "expected an n x n matrix");
      B.push_back(std::move(Bi));
    }
  }
  const auto m = static_cast<Eigen::Index>(B.size());
  Matrix C = Matrix::Zero(n, m);
  if (j.contains("C")) {
    const auto& cj = j.at("C");
    if (m == 1 && cj.is_array() && !cj.empty() && cj[0].is_number()) {
      C = vector_from_json(cj, "/C");
    } else if (m > 0) {
      C = matrix_from_json(cj, "/C");
    }
    if (C.rows() != n || C.cols() != m) shape_error("/C", "expected an n x m matrix");
  }
  Vector d = Vector::Zero(n);
  if (j.contains("d")) {
    d = vector_from_json(j.at("d"), "/d");
    if (d.size() != n) shape_error("/d", "expected an n-vector");
  }
  ControlRange omega = control_range_from_json(j.at("omega"), "/omega");
  if (omega.dim() != m) shape_error("/omega", "control range dimension differs from the number of B matrices");
  try {
    return AffineSystem(std::move(A), std::move(B), std::move(C), std::move(d), std::move(omega));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    shape_error("", e.what());
  }
}

SystemConfig parse_system(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    std::ostringstream os;
    os << "line " << line << ", column " << column << ": " << e.what();
    throw ConfigError(os.str(), line, column, "");
  }
  SystemConfig cfg{system_from_json(j), j.contains("analysis") ? j.at("analysis") : json::object()};
  return cfg;
}

SystemConfig load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path, 0, 0, "");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

json to_json(const AnalysisReport& r) {
  json steps = json::array();
  for (const auto& s : r.steps) {
    json step = {{"command", s.command}, {"parameters", s.parameters}, {"outcome", s.outcome}};
    if (s.timingMs) step["timingMs"] = *s.timingMs;
    steps.push_back(std::move(step));
  }
  return {{"systemEcho", r.systemEcho},
          {"steps", steps},
          {"verdicts", r.verdicts},
          {"figures", r.figures},
          {"seed", r.seed},
          {"version", {{"tool", r.toolVersion}, {"schema", r.schemaVersion}}}};
}

AnalysisReport report_from_json(const json& j) {
  AnalysisReport r;
  r.systemEcho = j.at("systemEcho");
  for (const auto& s : j.at("steps")) {
    ReportStep step{s.at("command").get<std::string>(), s.at("parameters"), s.at("outcome").get<std::string>(),
                    std::nullopt};
    if (s.contains("timingMs")) step.timingMs = s.at("timingMs").get<double>();
    r.steps.push_back(std::move(step));
  }
  r.verdicts = j.at("verdicts");
  r.figures = j.at("figures").get<std::vector<std::string>>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.toolVersion = j.at("version").at("tool").get<std::string>();
  r.schemaVersion = j.at("version").at("schema").get<int>();
  return r;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace conset
