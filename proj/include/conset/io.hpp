#pragma once

#include "conset/error.hpp"
#include "conset/model.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace conset {

/// Malformed configuration. Line and column are 1-based and 0 when the input
/// parsed as JSON but has the wrong shape; path is the JSON pointer then.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line, int column, std::string path)
      : Error(ErrorKind::InvalidInput, what), line_(line), column_(column), path_(std::move(path)) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& path() const noexcept { return path_; }

 private:
  int line_;
  int column_;
  std::string path_;
};

nlohmann::json to_json(const Matrix& M);
nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const ControlRange& omega);
nlohmann::json to_json(const AffineSystem& sys);

Matrix matrix_from_json(const nlohmann::json& j, const std::string& path);
Vector vector_from_json(const nlohmann::json& j, const std::string& path);
ControlRange control_range_from_json(const nlohmann::json& j, const std::string& path);
AffineSystem system_from_json(const nlohmann::json& j);

struct SystemConfig {
  AffineSystem system;
  /// Optional "analysis" section passed through to the CLI.
  nlohmann::json analysis;
};

SystemConfig parse_system(const std::string& text);
SystemConfig load_system(const std::string& path);

struct ReportStep {
  std::string command;
  nlohmann::json parameters;
  std::string outcome;
  std::optional<double> timingMs;

  bool operator==(const ReportStep& o) const {
    return command == o.command && parameters == o.parameters && outcome == o.outcome && timingMs == o.timingMs;
  }
};

struct AnalysisReport {
  nlohmann::json systemEcho;
  std::vector<ReportStep> steps;
  nlohmann::json verdicts;
  std::vector<std::string> figures;
  std::uint64_t seed = 0;
  std::string toolVersion = "0.1.0";
  int schemaVersion = 1;

  bool operator==(const AnalysisReport& o) const {
    return systemEcho == o.systemEcho && steps == o.steps && verdicts == o.verdicts && figures == o.figures &&
           seed == o.seed && toolVersion == o.toolVersion && schemaVersion == o.schemaVersion;
  }
};

nlohmann::json to_json(const AnalysisReport& r);
AnalysisReport report_from_json(const nlohmann::json& j);

/// Pretty-printed with sorted keys and a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace conset
