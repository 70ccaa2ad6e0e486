#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "helpers.hpp"
#include "tailcheck/config.hpp"

using namespace tailcheck;
using testing_util::code_of;

namespace {

bool has_path(const std::vector<Diagnostic>& d, const std::string& path) {
  return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) { return x.path == path; });
}

const char* kMinimal = R"({"synthetic": {}})";

}  // namespace

TEST_CASE("shipped sample configuration is valid") {
  const auto diags = validate_config(std::filesystem::path(TAILCHECK_SOURCE_DIR) / "configs/desk.json");
  CHECK(diags.empty());
  const RunConfig cfg = load_run_config(std::filesystem::path(TAILCHECK_SOURCE_DIR) / "configs/desk.json");
  REQUIRE(cfg.synthetic);
  CHECK(cfg.synthetic->nlat == 10);
  CHECK(cfg.synthetic->nlon == 20);
  CHECK(cfg.synthetic->small_members == 50);
  CHECK(cfg.synthetic->huge_members == 7424);
  CHECK(cfg.analysis.extreme_probability == 0.999);
  CHECK(cfg.analysis.lead_hours == std::vector<int>{240, 246, 252, 258});
  CHECK(cfg.analysis.land_threshold == 0.75);
  CHECK(cfg.mcmc.chains == 4);
}

TEST_CASE("defaults") {
  const RunConfig cfg = parse_run_config(kMinimal, "/base");
  CHECK(cfg.workspace == std::filesystem::path("/base/workspace"));
  CHECK(cfg.jobs == 1);
  CHECK(cfg.warning_exit_code == 3);
  CHECK(cfg.variables == std::vector<std::string>{"t2m", "heat_index"});
  CHECK(cfg.fit.retain_all);
  CHECK(cfg.report.low_containment == 0.33);
}

TEST_CASE("probability outside the unit interval") {
  const auto d = validate_config_text(R"({"synthetic": {}, "analysis": {"extreme_probability": 1.5}})", ".");
  CHECK(has_path(d, "analysis.extreme_probability"));
}

TEST_CASE("burn-in not below iterations") {
  const auto d = validate_config_text(R"({"synthetic": {}, "mcmc": {"iterations": 100, "burn_in": 100}})", ".");
  CHECK(has_path(d, "mcmc.burn_in"));
}

TEST_CASE("every violation is reported with its path") {
  const auto d = validate_config_text(
      R"({"synthetic": {"scale": -1, "land": "ocean"}, "jobs": 0, "bogus": 1,
          "mcmc": {"thin": "five"}, "variables": ["t2m", "wind"],
          "confidence_edges": [0.9, 0.5]})",
      ".");
  for (const char* p : {"synthetic.scale", "synthetic.land", "jobs", "bogus", "mcmc.thin",
                        "variables", "confidence_edges"}) {
    CAPTURE(p);
    CHECK(has_path(d, p));
  }
}

TEST_CASE("malformed text") {
  const auto d = validate_config_text("{not json", ".");
  REQUIRE(d.size() == 1);
  CHECK(d[0].path.empty());
  CHECK(code_of([] { parse_run_config("[1, 2]", "."); }) == ErrorCode::kConfig);
}

TEST_CASE("input files") {
  const auto dir = testing_util::scratch_dir("config_inputs");
  for (const char* f : {"s.tcb", "sd.tcb", "h.tcb", "hd.tcb", "o.tcb", "od.tcb", "land.tcb"})
    std::ofstream(dir / f) << "x";
  const std::string ok = R"({"inputs": {
      "small": {"t2m": ["s.tcb"], "dewpoint": ["sd.tcb"]},
      "huge": {"t2m": ["h.tcb"], "dewpoint": ["hd.tcb"]},
      "observed": {"t2m": ["o.tcb"], "dewpoint": ["od.tcb"]},
      "land_mask": "land.tcb"}})";
  CHECK(validate_config_text(ok, dir).empty());

  std::string missing = ok;
  missing.replace(missing.find("h.tcb"), 5, "zz.tcb");
  CHECK(has_path(validate_config_text(missing, dir), "inputs.huge"));

  std::string dup = ok;
  dup.replace(dup.find("h.tcb"), 5, "s.tcb");
  CHECK(!validate_config_text(dup, dir).empty());

  CHECK(has_path(validate_config_text(R"({"inputs": {}, "synthetic": {}})", dir), "inputs"));
  CHECK(has_path(validate_config_text("{}", dir), "inputs"));
}

TEST_CASE("validation reads files and reports unreadable ones") {
  CHECK(code_of([] { validate_config("/nonexistent/config.json"); }) == ErrorCode::kIo);
}

TEST_CASE("environment overrides workspace and parallelism") {
  const auto dir = testing_util::scratch_dir("config_env");
  std::ofstream(dir / "c.json") << kMinimal;
  setenv("TAILCHECK_WORKSPACE", "/tmp/elsewhere", 1);
  setenv("TAILCHECK_JOBS", "3", 1);
  const RunConfig cfg = load_run_config(dir / "c.json");
  CHECK(cfg.workspace == std::filesystem::path("/tmp/elsewhere"));
  CHECK(cfg.jobs == 3);
  setenv("TAILCHECK_JOBS", "zero", 1);
  CHECK(code_of([&] { load_run_config(dir / "c.json"); }) == ErrorCode::kConfig);
  unsetenv("TAILCHECK_WORKSPACE");
  unsetenv("TAILCHECK_JOBS");
}

TEST_CASE("synthetic cell parameters") {
  SyntheticConfig s;
  s.nlat = 2;
  s.nlon = 1;
  s.lat_first = 60;
  s.lat_last = -30;
  const auto p = s.cell_params(0.0);
  CHECK(p[0].location == doctest::Approx(30 - 0.1 * 60));
  CHECK(p[1].location == doctest::Approx(30 - 0.1 * 30));
  CHECK(s.cell_params(3.0)[0].location == doctest::Approx(p[0].location + 3 * s.scale));
}
