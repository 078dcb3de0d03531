#include "conset/io.hpp"
#include "systems.hpp"

#include <catch_amalgamated.hpp>

using namespace conset;
using namespace conset::testing;

TEST_CASE("system json round trip") {
  for (const auto& sys : {quadrant_system(), shear_system(), damped_affine(1.2, 0.5)}) {
    const auto back = system_from_json(to_json(sys));
    CHECK(back == sys);
    CHECK(back.omega() == sys.omega());
  }
}

TEST_CASE("scalar shorthand for one input") {
  const auto cfg = parse_system(R"({"dim": 2, "A": [[0, 1], [1, 0]], "B": [[[2, 0], [0, 2]]],
    "C": [0, 1], "omega": {"set": [-1, 1]}, "analysis": {"grid": 11}})");
  CHECK(cfg.system.C() == vec2(0, 1));
  CHECK(cfg.system.omega().as_set().points.size() == 2);
  CHECK(cfg.analysis.at("grid") == 11);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_system("{\n  \"dim\": 2,\n  \"A\": [[0, 1] [1, 0]]\n}");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 0);
  }
}

TEST_CASE("shape errors carry a path") {
  auto path_of = [](const std::string& text) {
    try {
      parse_system(text);
    } catch (const ConfigError& e) {
      CHECK(e.line() == 0);
      return e.path();
    }
    return std::string("no error");
  };
  CHECK(path_of(R"({"dim": 2, "A": [[0, 1], [1]], "omega": {"box": {"lower": [], "upper": []}}})") == "/A/1");
  CHECK(path_of(R"({"dim": 2, "A": [[0, 1], [1, 0]], "B": [[[1, 0], [0, 1]]], "omega": {"set": [[0, 0]]}})") ==
        "/omega");
  CHECK(path_of(R"({"schema": 2, "dim": 1, "A": [[0]], "omega": {"set": []}})") == "/schema");
  CHECK(path_of(R"({"dim": 1, "A": [["x"]], "omega": {"set": []}})") == "/A/0/0");
  CHECK(path_of(R"({"dim": 1, "omega": {"set": []}})") == "/A");
}

TEST_CASE("report round trip and sorted keys") {
  AnalysisReport r;
  r.systemEcho = to_json(damped_oscillator());
  r.steps.push_back({"lie", {{"maxDepth", 8}}, "ok", std::nullopt});
  r.steps.push_back({"kappa", nlohmann::json::object(), "done", 12.5});
  r.verdicts = {{"zeta", 1}, {"alpha", {{"b", 2}, {"a", 1}}}};
  r.figures = {"x.svg"};
  r.seed = 42;
  const auto j = to_json(r);
  CHECK(report_from_json(j) == r);
  const std::string text = dump(j);
  CHECK(text.back() == '\n');
  CHECK(text.find("\"alpha\"") < text.find("\"zeta\""));
  CHECK(text.find("\"a\": 1") < text.find("\"b\": 2"));
}
