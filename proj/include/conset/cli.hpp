#pragma once

#include "conset/io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace conset {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitUndecided = 2,
  kExitConfig = 64,
  kExitNumerical = 70,
};

struct AnalyzeOptions {
  int circleCells = 720;
  double tau = 0.2;
  int spectralBudget = 2000;
  int lieSamples = 64;
  int lieDepth = 8;
  int branchGrid = 241;
  std::optional<std::pair<double, double>> uRange;
  std::uint64_t seed = 1;
  bool timings = false;
  /// Directory for figures; empty disables figure output.
  std::string figureDir;
};

/// Reads overrides from a config "analysis" section (keys cells, tau, budget,
/// lieSamples, lieDepth, grid, uRange).
AnalyzeOptions options_from_config(const nlohmann::json& analysis, AnalyzeOptions base = {});

struct AnalyzeOutcome {
  AnalysisReport report;
  bool undecided = false;
};

/// The full pipeline. Homogeneous planar systems: accessibility, projective
/// and circle control sets, pairing, spectra, cone lifts, global exponents.
/// Homogeneous systems in higher dimension: accessibility and exponents.
/// Inhomogeneous systems with one input: equilibrium branches.
AnalyzeOutcome analyze(const AffineSystem& sys, const AnalyzeOptions& opt);

/// Entry point of the conset executable.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace conset
