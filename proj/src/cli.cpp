#include "conset/cli.hpp"

#include "conset/cone.hpp"
#include "conset/diophantine.hpp"
#include "conset/dynamics.hpp"
#include "conset/equilibria.hpp"
#include "conset/liealgebra.hpp"
#include "conset/reachability.hpp"
#include "conset/spectrum.hpp"
#include "conset/svg.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace conset {

using nlohmann::json;

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

// Carries the name of the failing step to the exit-code handler.
class StepError : public Error {
 public:
  StepError(const Error& e, std::string step) : Error(e.kind(), e.what()), step_(std::move(step)) {}
  const std::string& step() const { return step_; }

 private:
  std::string step_;
};

class Recorder {
 public:
  Recorder(AnalysisReport& report, bool timings) : report_(report), timings_(timings) {}

  template <class F>
  auto run(const std::string& command, json parameters, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto [value, outcome] = body();
      ReportStep step{command, std::move(parameters), std::move(outcome), std::nullopt};
      if (timings_) {
        step.timingMs = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      }
      report_.steps.push_back(std::move(step));
      return value;
    } catch (const StepError&) {
      throw;
    } catch (const Error& e) {
      throw StepError(e, command);
    }
  }

 private:
  AnalysisReport& report_;
  bool timings_;
};

json ranges_json(const ControlSetResult& cs, const CellGrid& grid) {
  json out = json::array();
  for (const auto& [a, b] : cell_ranges(cs, grid)) out.push_back({a, b});
  return out;
}

json set_json(const ControlSetResult& cs, const CellGrid& grid) {
  json j = {{"id", cs.id},
            {"manifold", to_string(cs.manifold)},
            {"cellCount", cs.cells.size()},
            {"cellRanges", ranges_json(cs, grid)},
            {"invariant", cs.invariant},
            {"hasInterior", cs.hasInterior}};
  if (grid.one_dimensional()) {
    if (const auto arc = set_arc(cs, grid)) {
      j["arcDegrees"] = {arc->first * kRadToDeg, arc->second * kRadToDeg};
    } else {
      j["arcDegrees"] = "whole";
    }
  } else {
    j["touchesExterior"] = cs.touchesExterior;
  }
  return j;
}

json signal_json(const ControlSignal& u) {
  json out = json::array();
  for (const auto& s : u.segments()) out.push_back({{"duration", s.duration}, {"value", to_json(s.value)}});
  return out;
}

json spectrum_json(const SpectralEstimate& est) {
  int constant = 0;
  for (const auto& s : est.samples) constant += s.constantControl ? 1 : 0;
  return {{"setRef", est.setRef},
          {"interval", {est.lo, est.hi}},
          {"containsZeroInterior", to_string(est.containsZeroInterior)},
          {"nSamples", est.samples.size()},
          {"nConstantSamples", constant},
          {"kind", "inner estimate"}};
}

json certificate_json(const ConeLiftCertificate& c) {
  return {{"sPlus", to_json(c.sPlus)},         {"sMinus", to_json(c.sMinus)},
          {"uPlus", signal_json(c.uPlus)},     {"uMinus", signal_json(c.uMinus)},
          {"sigmaPlus", c.sigmaPlus},          {"sigmaMinus", c.sigmaMinus},
          {"alphaPlus", c.alphaPlus},          {"alphaMinus", c.alphaMinus},
          {"residualPlus", c.residualPlus},    {"residualMinus", c.residualMinus}};
}

json lie_json(const LieBasis& basis, const ArcReport& arc) {
  json failures = json::array();
  for (const auto& f : arc.failures) failures.push_back({{"point", to_json(f.point)}, {"rank", f.projectiveRank}});
  return {{"spanDim", basis.span.size()},      {"saturated", basis.saturated},   {"depth", basis.depth},
          {"failures", failures},              {"samples", arc.points.size()},   {"marginal", arc.anyMarginal},
          {"rankTransferHolds", arc.transferHolds}};
}

json unbounded_json(const UnboundedCertificate& c) {
  return {{"uSingular", c.uSingular},
          {"direction", to_json(c.direction)},
          {"normReached", c.normReached},
          {"angleToKernel", c.angleToKernel},
          {"zeroEigenvalue", c.zeroEigenvalue},
          {"outsideRange", c.outsideRange},
          {"certified", c.certified}};
}

json branch_json(const EquilibriumBranch& br, int n) {
  json kal = json::array();
  int ok = 0;
  for (const auto& k : br.kalman) ok += k.rank == n ? 1 : 0;
  json unb = json::array();
  for (const auto& c : br.unbounded) unb.push_back(unbounded_json(c));
  json pts = json::array();
  const std::size_t stride = std::max<std::size_t>(1, br.points.size() / 20);
  for (std::size_t i = 0; i < br.points.size(); i += stride) {
    const auto& p = br.points[i];
    pts.push_back({{"u", to_json(p.u)}, {"x", to_json(p.x)}, {"kind", to_string(p.kind)}});
  }
  return {{"interval", {br.sLo, br.sHi}},
          {"singularEndpoints", br.singularEndpoints},
          {"stabilityType", to_string(br.stabilityType)},
          {"eigenCounts", {{"negRe", br.counts.negRe}, {"posRe", br.counts.posRe}, {"marginal", br.counts.marginal}}},
          {"kalman", {{"samples", br.kalman.size()}, {"fullRank", ok}, {"allOk", br.kalmanAllOk}}},
          {"unbounded", unb},
          {"continuityFlags", br.continuityFlags},
          {"samplePoints", pts}};
}

json around_json(const AroundVerdict& v) {
  json certs = json::array();
  for (const auto& c : v.certificates) certs.push_back(unbounded_json(c));
  json sketch = json::array();
  for (const auto& cs : v.sketch) sketch.push_back({{"cellCount", cs.cells.size()}, {"invariant", cs.invariant}});
  return {{"verdict", v.containsControlSet ? "ContainsControlSet" : "Undecided"},
          {"unbounded", v.unbounded},
          {"unboundedCertificates", certs},
          {"globalReachMinus", v.globalReachMinus},
          {"globalReachPlus", v.globalReachPlus},
          {"uniformlyHyperbolic", v.uniformlyHyperbolic},
          {"notes", v.notes},
          {"sketch", sketch}};
}

std::vector<Vector> graph_controls(const AffineSystem& sys) {
  if (sys.inputs() > 2 && sys.omega().is_box()) {
    fail(ErrorKind::InvalidInput, "graph discretization samples box ranges with m <= 2");
  }
  auto controls = sys.omega().grid_sample();
  if (controls.empty()) controls.push_back(Vector(0));
  return controls;
}

std::string figure(AnalysisReport& report, const AnalyzeOptions& opt, const std::string& name,
                   const std::string& content) {
  if (opt.figureDir.empty()) return name;
  write_text_file((std::filesystem::path(opt.figureDir) / name).string(), content);
  report.figures.push_back(name);
  return name;
}

void analyze_homogeneous(const AffineSystem& sys, const AnalyzeOptions& opt, AnalysisReport& report, Recorder& rec,
                         bool& undecided) {
  const LieBasis basis = rec.run("lie", {{"maxDepth", opt.lieDepth}, {"samples", opt.lieSamples}}, [&] {
    LieBasis b = generate_lie_algebra(sys, opt.lieDepth);
    const ArcReport arc = check_arc_projective(b, sphere_samples(sys.dim(), opt.lieSamples, opt.seed));
    report.verdicts["accessibility"] = lie_json(b, arc);
    std::ostringstream os;
    os << "span dimension " << b.span.size() << ", " << arc.failures.size() << " failing samples";
    return std::make_pair(b, os.str());
  });

  const auto controls = sys.inputs() <= 2 || !sys.omega().is_box() ? sys.omega().grid_sample()
                                                                   : std::vector<Vector>{};
  const GlobalExponents ge = rec.run("kappa", {{"controls", control_sequence(sys.omega(), 64).size()}}, [&] {
    GlobalExponents g = global_exponents(sys, control_sequence(sys.omega(), 64), 200, opt.seed);
    std::ostringstream os;
    os << "kappa* = " << g.kappaStar << ", kappa = " << g.kappa;
    return std::make_pair(g, os.str());
  });
  report.verdicts["exponents"] = {{"kappaStar", ge.kappaStar}, {"kappa", ge.kappa}, {"method", ge.method}};

  if (sys.dim() != 2) {
    report.verdicts["controllability"] = {{"verdict", "Undecided"},
                                          {"reason", "control sets are computed for planar systems only"}};
    undecided = true;
    return;
  }

  const int Nc = opt.circleCells;
  const CellGrid circle = CellGrid::circle(Nc);
  const CellGrid projective = CellGrid::projective(Nc / 2);
  const auto gc = graph_controls(sys);
  const json graphParams = {{"cells", Nc}, {"tau", opt.tau}, {"controls", gc.size()}};

  const TransitionGraph gp = rec.run("control-sets/projective", graphParams, [&] {
    TransitionGraph g = build_graph(sys, projective, gc, opt.tau);
    return std::make_pair(g, std::string("graph built"));
  });
  const auto projSets = find_control_sets(gp, &basis);
  const TransitionGraph gcirc = rec.run("control-sets/circle", graphParams, [&] {
    TransitionGraph g = build_graph(sys, circle, gc, opt.tau);
    return std::make_pair(g, std::string("graph built"));
  });
  const auto circSets = find_control_sets(gcirc, &basis);

  const PairingReport pairing = rec.run("pairing", json::object(), [&] {
    PairingReport p = pair_sphere_projective(circSets, circle, projSets, projective);
    return std::make_pair(p, std::string(p.allAntipodal ? "antipodal pairs consistent" : "antipodal mismatch"));
  });

  json projJson = json::array();
  for (const auto& cs : projSets) {
    json j = set_json(cs, projective);
    if (cs.hasInterior) {
      try {
        const SpectralEstimate est = floquet_spectrum_estimate(sys, gp, cs, {opt.spectralBudget, opt.seed, 20.0});
        j["spectrum"] = spectrum_json(est);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::EstimateUnavailable) throw StepError(e, "spectrum/projective");
        j["spectrum"] = {{"error", e.what()}};
      }
    }
    projJson.push_back(std::move(j));
  }

  json circJson = json::array();
  int cones = 0;
  int invariantCones = 0;
  for (const auto& cs : circSets) {
    json j = set_json(cs, circle);
    std::optional<SpectralEstimate> est;
    if (cs.hasInterior) {
      try {
        est = floquet_spectrum_estimate(sys, gcirc, cs, {opt.spectralBudget, opt.seed, 20.0});
        j["spectrum"] = spectrum_json(*est);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::EstimateUnavailable) throw StepError(e, "spectrum/circle");
        j["spectrum"] = {{"error", e.what()}};
      }
    }
    if (est && cs.hasInterior) {
      const LiftResult lift = rec.run("lift", {{"set", cs.id}}, [&] {
        LiftResult r = lift_cone(sys, cs, est);
        return std::make_pair(r, std::string(to_string(r.verdict)));
      });
      json lj = {{"verdict", to_string(lift.verdict)}, {"note", lift.note}};
      if (lift.cone && lift.cone->certificate) lj["certificate"] = certificate_json(*lift.cone->certificate);
      if (lift.verdict == LiftVerdict::ConeControlSet) {
        ++cones;
        if (cs.invariant) ++invariantCones;
      }
      if (lift.verdict == LiftVerdict::Undecided) undecided = true;
      j["lift"] = std::move(lj);
    } else {
      j["lift"] = {{"verdict", "Undecided"}, {"note", "no spectral data"}};
      undecided = true;
    }
    circJson.push_back(std::move(j));
  }

  json pairJson = json::array();
  for (const auto& e : pairing.entries) {
    pairJson.push_back({{"projectiveSet", e.projectiveSet},
                        {"sphereSets", e.sphereSets},
                        {"antipodal", e.antipodal},
                        {"singlePreimage", e.singlePreimage}});
  }

  const ControllabilityVerdict verdict = controllability_verdict(projSets, projective, ge, &circSets, &circle);
  if (verdict.verdict == Verdict::Undecided) undecided = true;
  report.verdicts["controllability"] = {{"verdict", to_string(verdict.verdict)}, {"reason", verdict.reason}};
  report.verdicts["controlSets"] = {{"projective", projJson},
                                    {"circle", circJson},
                                    {"pairing", pairJson},
                                    {"coneControlSets", cones},
                                    {"invariantCones", invariantCones}};
  figure(report, opt, "control_sets_circle.svg", control_sets_svg(circle, circSets));
  figure(report, opt, "control_sets_projective.svg", control_sets_svg(projective, projSets));
}

void analyze_affine(const AffineSystem& sys, const AnalyzeOptions& opt, AnalysisReport& report, Recorder& rec,
                    bool& undecided) {
  if (sys.inputs() != 1) {
    report.verdicts["equilibria"] = {{"error", "branch analysis over the control range needs m = 1"}};
    undecided = true;
    return;
  }
  std::pair<double, double> range;
  if (opt.uRange) {
    range = *opt.uRange;
  } else if (sys.omega().is_box()) {
    range = {sys.omega().as_box().lower[0], sys.omega().as_box().upper[0]};
  } else {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& p : sys.omega().as_set().points) lo = std::min(lo, p[0]), hi = std::max(hi, p[0]);
    range = {lo, hi};
  }
  const BranchTrace trace = rec.run(
      "equilibria", {{"uRange", {range.first, range.second}}, {"grid", opt.branchGrid}}, [&] {
        BranchTrace t = trace_branches(sys, range.first, range.second, opt.branchGrid);
        return std::make_pair(t, std::to_string(t.branches.size()) + " branches");
      });
  json branches = json::array();
  int contains = 0;
  int unbounded = 0;
  for (const auto& br : trace.branches) {
    const AroundVerdict v = control_set_around(sys, br);
    json j = branch_json(br, sys.dim());
    j["controlSet"] = around_json(v);
    contains += v.containsControlSet ? 1 : 0;
    unbounded += v.unbounded ? 1 : 0;
    undecided = undecided || v.undecided;
    branches.push_back(std::move(j));
  }
  std::vector<double> scanGrid;
  for (int i = 0; i < opt.branchGrid; ++i) {
    scanGrid.push_back(range.first + (range.second - range.first) * i / (opt.branchGrid - 1));
  }
  const RankScan scan = rank_scan(sys, scanGrid);
  json clusters = json::array();
  for (const auto& [a, b] : scan.clusters) clusters.push_back({a, b});
  report.verdicts["equilibria"] = {{"roots", trace.roots},
                                   {"suspectedTangencies", trace.suspectedTangencies},
                                   {"branches", branches},
                                   {"containsControlSet", contains},
                                   {"unbounded", unbounded},
                                   {"rankScan", {{"failing", scan.failing.size()},
                                                 {"clusters", clusters},
                                                 {"undefined", scan.undefined}}}};
  figure(report, opt, "branches.svg", branches_svg(trace, sys.dim()));
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidInput, "not a number: '" + item + "'");
    }
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

// "0.5:1,-1;2:0,0" is duration:value segments.
ControlSignal parse_signal(const std::string& text) {
  std::vector<Segment> segs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) fail(ErrorKind::InvalidInput, "segment needs duration:value");
    const auto dur = parse_numbers(item.substr(0, colon));
    if (dur.size() != 1) fail(ErrorKind::InvalidInput, "segment duration must be one number");
    segs.push_back(Segment{dur[0], to_vector(parse_numbers(item.substr(colon + 1)))});
  }
  return ControlSignal(std::move(segs));
}

void emit(std::ostream& out, const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_text_file(path, content);
  }
}

}  // namespace

AnalyzeOptions options_from_config(const json& analysis, AnalyzeOptions base) {
  if (!analysis.is_object()) return base;
  auto get = [&](const char* key, auto& field) {
    if (analysis.contains(key)) field = analysis.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("cells", base.circleCells);
  get("tau", base.tau);
  get("budget", base.spectralBudget);
  get("lieSamples", base.lieSamples);
  get("lieDepth", base.lieDepth);
  get("grid", base.branchGrid);
  if (analysis.contains("uRange")) {
    const auto r = analysis.at("uRange").get<std::vector<double>>();
    if (r.size() != 2) throw ConfigError("/analysis/uRange: expected [lo, hi]", 0, 0, "/analysis/uRange");
    base.uRange = std::make_pair(r[0], r[1]);
  }
  return base;
}

AnalyzeOutcome analyze(const AffineSystem& sys, const AnalyzeOptions& opt) {
  AnalyzeOutcome out;
  out.report.systemEcho = to_json(sys);
  out.report.seed = opt.seed;
  out.report.verdicts = json::object();
  Recorder rec(out.report, opt.timings);
  bool undecided = false;
  if (sys.is_homogeneous()) {
    analyze_homogeneous(sys, opt, out.report, rec, undecided);
  } else {
    analyze_affine(sys, opt, out.report, rec, undecided);
  }
  out.undecided = undecided;
  return out;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"conset: controllability structure of affine and bilinear control systems"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string systemPath;
  std::uint64_t seed = 1;
  std::string outPath;
  std::string format = "json";
  app.add_option("--system", systemPath, "System description (JSON)");
  app.add_option("--seed", seed, "Seed for all sampling");
  app.add_option("--out", outPath, "Output directory (analyze) or file (other commands)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  AnalyzeOptions aopt;
  auto* analyzeCmd = app.add_subcommand("analyze", "Run the full analysis and write report.json and figures");
  analyzeCmd->add_flag("--timings", aopt.timings, "Record wall-clock timings (reports are then not reproducible)");

  std::string x0Text, controlText, signalText;
  double horizon = 1.0, dt = 0.1;
  bool sphere = false;
  auto* simulateCmd = app.add_subcommand("simulate", "Trajectory of a piecewise-constant control");
  simulateCmd->add_option("--x0", x0Text, "Initial state, comma separated")->required();
  simulateCmd->add_option("--control", controlText, "Constant control value, comma separated");
  simulateCmd->add_option("--signal", signalText, "Segments duration:value;duration:value");
  simulateCmd->add_option("--horizon", horizon, "Final time");
  simulateCmd->add_option("--dt", dt, "Output spacing");
  simulateCmd->add_flag("--sphere", sphere, "Emit the projected trajectory");

  std::string manifold = "circle", boxText, svgPath;
  int cells = 720;
  double tau = 0.2;
  auto* setsCmd = app.add_subcommand("control-sets", "Control sets on a discretized manifold");
  setsCmd->add_option("--manifold", manifold)->check(CLI::IsMember({"circle", "projective", "box"}));
  setsCmd->add_option("--cells", cells, "Cells (circle/projective) or cells per axis (box)");
  setsCmd->add_option("--tau", tau, "Edge time");
  setsCmd->add_option("--box", boxText, "xlo,xhi,ylo,yhi for box grids");
  setsCmd->add_option("--svg", svgPath, "SVG output");

  std::vector<double> uRange;
  int grid = 241;
  std::string eqSvg;
  auto* eqCmd = app.add_subcommand("equilibria", "Equilibrium branches for a scalar control");
  eqCmd->add_option("--u-range", uRange, "Control interval")->expected(2);
  eqCmd->add_option("--grid", grid, "Grid points");
  eqCmd->add_option("--svg", eqSvg, "SVG output");

  int setId = 0, budget = 2000, specCells = 720;
  std::string specManifold = "circle";
  double specTau = 0.2;
  auto* specCmd = app.add_subcommand("spectrum", "Floquet spectrum estimate of one control set");
  specCmd->add_option("--set", setId, "Control set id");
  specCmd->add_option("--budget", budget, "Sampling attempts");
  specCmd->add_option("--manifold", specManifold)->check(CLI::IsMember({"circle", "projective"}));
  specCmd->add_option("--cells", specCells, "Circle cells (projective uses half)");
  specCmd->add_option("--tau", specTau, "Edge time");

  int kappaSamples = 200;
  auto* kappaCmd = app.add_subcommand("kappa", "Extremal Lyapunov exponent estimates");
  kappaCmd->add_option("--samples", kappaSamples, "Periodic switching samples");

  DioQuery dq;
  auto* dioCmd = app.add_subcommand("dio", "Exponent pair with |a^k b^-l - c| < eps");
  dioCmd->add_option("--a", dq.a)->required();
  dioCmd->add_option("--b", dq.b)->required();
  dioCmd->add_option("--c", dq.c)->required();
  dioCmd->add_option("--eps", dq.eps)->required();
  dioCmd->add_option("--max-ell", dq.maxEll);

  int lieSamples = 256, lieDepth = 8;
  auto* lieCmd = app.add_subcommand("lie", "Lie algebra and projective accessibility check");
  lieCmd->add_option("--samples", lieSamples, "Sample points");
  lieCmd->add_option("--depth", lieDepth, "Maximal bracket depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  std::string step = app.get_subcommands().front()->get_name();
  try {
    auto loadSys = [&]() {
      if (systemPath.empty()) throw ConfigError("--system is required", 0, 0, "");
      return load_system(systemPath);
    };
    if (*dioCmd) {
      const DioResult r = solve(dq);
      if (format == "csv") {
        out << "k,ell,residual\n" << r.k << ',' << r.ell << ',' << std::setprecision(17) << r.residual << '\n';
      } else {
        out << dump({{"k", r.k}, {"ell", r.ell}, {"residual", r.residual}});
      }
      return kExitOk;
    }
    const SystemConfig cfg = loadSys();
    const AffineSystem& sys = cfg.system;
    if (*analyzeCmd) {
      AnalyzeOptions opt = options_from_config(cfg.analysis, aopt);
      opt.seed = seed;
      opt.timings = aopt.timings;
      const std::string dir = outPath.empty() ? "." : outPath;
      std::filesystem::create_directories(dir);
      opt.figureDir = dir;
      const AnalyzeOutcome res = analyze(sys, opt);
      const std::string reportPath = (std::filesystem::path(dir) / "report.json").string();
      write_text_file(reportPath, dump(to_json(res.report)));
      out << reportPath << '\n';
      return res.undecided ? kExitUndecided : kExitOk;
    }
    if (*simulateCmd) {
      const Vector x0 = to_vector(parse_numbers(x0Text));
      ControlSignal u;
      if (!signalText.empty()) {
        u = parse_signal(signalText);
      } else if (!controlText.empty()) {
        u = ControlSignal::constant(to_vector(parse_numbers(controlText)), horizon);
      } else {
        u = ControlSignal::constant(Vector::Zero(sys.inputs()), horizon);
      }
      u.validate(sys.omega());
      const auto pts = sample_trajectory(sys, x0, u, horizon, dt, sphere);
      std::ostringstream os;
      if (format == "json") {
        json rows = json::array();
        for (const auto& p : pts) {
          json row = {{"t", p.t}, {"x", to_json(p.x)}};
          if (std::isfinite(p.logRadius)) row["logr"] = p.logRadius;
          rows.push_back(std::move(row));
        }
        os << dump(rows);
      } else {
        write_trajectory_csv(os, pts);
      }
      emit(out, outPath, os.str());
      return kExitOk;
    }
    if (*setsCmd) {
      CellGrid g = CellGrid::circle(std::max(cells, 3));
      if (manifold == "projective") g = CellGrid::projective(cells);
      if (manifold == "box") {
        const auto b = parse_numbers(boxText);
        if (b.size() != 4) fail(ErrorKind::InvalidInput, "--box needs xlo,xhi,ylo,yhi");
        Vector lo(2), hi(2);
        lo << b[0], b[2];
        hi << b[1], b[3];
        g = CellGrid::box(lo, hi, {cells, cells});
      }
      const TransitionGraph tg = build_graph(sys, g, graph_controls(sys), tau);
      std::optional<LieBasis> basis;
      if (g.one_dimensional()) basis = generate_lie_algebra(sys, 8);
      const auto sets = find_control_sets(tg, basis ? &*basis : nullptr);
      json arr = json::array();
      for (const auto& cs : sets) arr.push_back(set_json(cs, g));
      emit(out, outPath, dump({{"manifold", manifold}, {"cells", g.size()}, {"tau", tau}, {"controlSets", arr}}));
      if (!svgPath.empty()) {
        write_text_file(svgPath, g.one_dimensional() ? control_sets_svg(g, sets) : box_sets_svg(g, sets));
      }
      return kExitOk;
    }
    if (*eqCmd) {
      double lo = 0.0, hi = 0.0;
      if (uRange.size() == 2) {
        lo = uRange[0];
        hi = uRange[1];
      } else if (sys.inputs() == 1 && sys.omega().is_box()) {
        lo = sys.omega().as_box().lower[0];
        hi = sys.omega().as_box().upper[0];
      } else {
        fail(ErrorKind::InvalidInput, "--u-range is required for this control range");
      }
      AnalyzeOptions opt;
      opt.uRange = std::make_pair(lo, hi);
      opt.branchGrid = grid;
      AnalysisReport report;
      Recorder rec(report, false);
      bool undecided = false;
      analyze_affine(sys, opt, report, rec, undecided);
      emit(out, outPath, dump(report.verdicts["equilibria"]));
      if (!eqSvg.empty()) {
        write_text_file(eqSvg, branches_svg(trace_branches(sys, lo, hi, grid), sys.dim()));
      }
      return undecided ? kExitUndecided : kExitOk;
    }
    if (*specCmd) {
      const int N = specManifold == "circle" ? specCells : specCells / 2;
      const CellGrid g = specManifold == "circle" ? CellGrid::circle(N) : CellGrid::projective(N);
      const TransitionGraph tg = build_graph(sys, g, graph_controls(sys), specTau);
      const LieBasis basis = generate_lie_algebra(sys, 8);
      const auto sets = find_control_sets(tg, &basis);
      if (setId < 0 || setId >= static_cast<int>(sets.size())) {
        fail(ErrorKind::InvalidInput, "no control set with id " + std::to_string(setId));
      }
      const SpectralEstimate est =
          floquet_spectrum_estimate(sys, tg, sets[static_cast<std::size_t>(setId)], {budget, seed, 20.0});
      emit(out, outPath, dump(spectrum_json(est)));
      return est.containsZeroInterior == TriState::Boundary ? kExitUndecided : kExitOk;
    }
    if (*kappaCmd) {
      const GlobalExponents ge = global_exponents(sys, control_sequence(sys.omega(), 64), kappaSamples, seed);
      emit(out, outPath, dump({{"kappaStar", ge.kappaStar}, {"kappa", ge.kappa}, {"method", ge.method}}));
      return kExitOk;
    }
    if (*lieCmd) {
      const LieBasis basis = generate_lie_algebra(sys, lieDepth);
      const ArcReport arc = check_arc_projective(basis, sphere_samples(sys.dim(), lieSamples, seed));
      emit(out, outPath, dump(lie_json(basis, arc)));
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StepError& e) {
    err << "step " << e.step() << " failed: " << e.what() << '\n';
    return e.kind() == ErrorKind::NumericalFailure ? kExitNumerical : kExitError;
  } catch (const Error& e) {
    err << "step " << step << " failed: " << e.what() << '\n';
    return e.kind() == ErrorKind::NumericalFailure ? kExitNumerical : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace conset
