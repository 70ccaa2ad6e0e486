#include "tailcheck/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tailcheck/error.hpp"

namespace tailcheck {

namespace {

using nlohmann::json;

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

// Collects problems instead of stopping at the first one.
class Reader {
 public:
  explicit Reader(std::vector<Diagnostic>& diags) : diags_(diags) {}

  void report(const std::string& path, const std::string& message) {
    diags_.push_back({path, message});
  }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    report(path, "expected an object");
    return false;
  }

  void allowed_keys(const json& obj, const std::string& path,
                    std::initializer_list<const char*> keys) {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!ok.contains(it.key())) report(join(path, it.key()), "unknown key");
  }

  template <typename T>
  void get(const json& obj, const std::string& path, const char* key, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw std::invalid_argument("number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_integer()) throw std::invalid_argument("integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (it->is_number_integer() && !it->is_number_unsigned())
            throw std::invalid_argument("nonnegative integer");
        }
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw std::invalid_argument("boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw std::invalid_argument("string");
      }
      out = it->get<T>();
    } catch (const std::exception& e) {
      report(join(path, key), std::string("wrong type (expected ") + e.what() + ")");
    }
  }

 private:
  std::vector<Diagnostic>& diags_;
};

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

void read_paths(Reader& r, const json& obj, const std::string& path,
                const char* key, const std::filesystem::path& base,
                std::vector<std::filesystem::path>& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_array()) {
    r.report(join(path, key), "expected an array of paths");
    return;
  }
  for (std::size_t i = 0; i < it->size(); ++i) {
    if (!(*it)[i].is_string()) {
      r.report(join(path, key) + "[" + std::to_string(i) + "]", "expected a path");
      continue;
    }
    out.push_back(resolve(base, (*it)[i].get<std::string>()));
  }
}

RunConfig parse_into(const json& root, const std::filesystem::path& base,
                     std::vector<Diagnostic>& diags) {
  Reader r(diags);
  RunConfig cfg;
  cfg.config_dir = base;
  if (!r.object(root, "")) return cfg;
  r.allowed_keys(root, "",
                 {"workspace", "seed", "jobs", "analysis", "mcmc",
                  "confidence_edges", "synthetic", "inputs", "variables", "fit",
                  "report", "warning_exit_code"});

  std::string workspace = "workspace";
  r.get(root, "", "workspace", workspace);
  cfg.workspace = resolve(base, workspace);
  r.get(root, "", "seed", cfg.seed);
  r.get(root, "", "jobs", cfg.jobs);
  r.get(root, "", "warning_exit_code", cfg.warning_exit_code);

  if (auto it = root.find("analysis"); it != root.end() && r.object(*it, "analysis")) {
    const json& a = *it;
    r.allowed_keys(a, "analysis",
                   {"extreme_probability", "lead_hours", "season", "land_threshold"});
    r.get(a, "analysis", "extreme_probability", cfg.analysis.extreme_probability);
    r.get(a, "analysis", "lead_hours", cfg.analysis.lead_hours);
    r.get(a, "analysis", "land_threshold", cfg.analysis.land_threshold);
    if (auto s = a.find("season"); s != a.end() && r.object(*s, "analysis.season")) {
      r.allowed_keys(*s, "analysis.season", {"start", "end"});
      for (const char* key : {"start", "end"}) {
        std::string text;
        r.get(*s, "analysis.season", key, text);
        if (text.empty()) continue;
        try {
          (std::string(key) == "start" ? cfg.analysis.season_start
                                       : cfg.analysis.season_end) =
              parse_month_day(text);
        } catch (const Error& e) {
          r.report(join("analysis.season", key), e.what());
        }
      }
    }
  }

  if (auto it = root.find("mcmc"); it != root.end() && r.object(*it, "mcmc")) {
    const json& m = *it;
    r.allowed_keys(m, "mcmc",
                   {"chains", "iterations", "burn_in", "thin", "adapt_window",
                    "target_acceptance"});
    r.get(m, "mcmc", "chains", cfg.mcmc.chains);
    r.get(m, "mcmc", "iterations", cfg.mcmc.iterations);
    r.get(m, "mcmc", "burn_in", cfg.mcmc.burn_in);
    r.get(m, "mcmc", "thin", cfg.mcmc.thin);
    r.get(m, "mcmc", "adapt_window", cfg.mcmc.adapt_window);
    r.get(m, "mcmc", "target_acceptance", cfg.mcmc.target_acceptance);
  }

  if (auto it = root.find("confidence_edges"); it != root.end()) {
    std::vector<double> edges;
    r.get(root, "", "confidence_edges", edges);
    if (edges.size() == cfg.confidence_edges.lower.size())
      std::copy(edges.begin(), edges.end(), cfg.confidence_edges.lower.begin());
    else
      r.report("confidence_edges", "expected 7 decreasing lower edges");
  }

  if (auto it = root.find("synthetic"); it != root.end() && r.object(*it, "synthetic")) {
    const json& s = *it;
    const std::string p = "synthetic";
    r.allowed_keys(s, p,
                   {"nlat", "nlon", "lat_first", "lat_last", "location_base",
                    "location_lat_slope", "scale", "shape", "small_members",
                    "huge_members", "huge_location_shift", "init_dates",
                    "depression_min", "depression_max", "land"});
    SyntheticConfig sc;
    r.get(s, p, "nlat", sc.nlat);
    r.get(s, p, "nlon", sc.nlon);
    r.get(s, p, "lat_first", sc.lat_first);
    r.get(s, p, "lat_last", sc.lat_last);
    r.get(s, p, "location_base", sc.location_base);
    r.get(s, p, "location_lat_slope", sc.location_lat_slope);
    r.get(s, p, "scale", sc.scale);
    r.get(s, p, "shape", sc.shape);
    r.get(s, p, "small_members", sc.small_members);
    r.get(s, p, "huge_members", sc.huge_members);
    r.get(s, p, "huge_location_shift", sc.huge_location_shift);
    r.get(s, p, "init_dates", sc.init_dates);
    r.get(s, p, "depression_min", sc.depression_min);
    r.get(s, p, "depression_max", sc.depression_max);
    r.get(s, p, "land", sc.land);
    cfg.synthetic = sc;
  }

  if (root.contains("synthetic") && root.contains("inputs"))
    r.report("inputs", "give either synthetic or inputs, not both");
  if (auto it = root.find("inputs"); it != root.end() && r.object(*it, "inputs")) {
    const json& in = *it;
    r.allowed_keys(in, "inputs", {"small", "huge", "observed", "land_mask"});
    for (const char* ens : {kEnsembleSmall, kEnsembleHuge, kEnsembleObserved}) {
      auto e = in.find(ens);
      if (e == in.end()) continue;
      const std::string p = join("inputs", ens);
      if (!r.object(*e, p)) continue;
      r.allowed_keys(*e, p, {"t2m", "dewpoint"});
      EnsembleInputs files;
      read_paths(r, *e, p, "t2m", base, files.t2m);
      read_paths(r, *e, p, "dewpoint", base, files.dewpoint);
      cfg.inputs[ens] = std::move(files);
    }
    std::string mask;
    r.get(in, "inputs", "land_mask", mask);
    if (!mask.empty()) cfg.land_mask = resolve(base, mask);
  }

  r.get(root, "", "variables", cfg.variables);

  if (auto it = root.find("fit"); it != root.end() && r.object(*it, "fit")) {
    r.allowed_keys(*it, "fit", {"retain_draws"});
    if (auto d = it->find("retain_draws"); d != it->end()) {
      if (d->is_string() && d->get<std::string>() == "all") {
        cfg.fit.retain_all = true;
      } else if (d->is_string() && d->get<std::string>() == "none") {
        cfg.fit.retain_all = false;
      } else if (d->is_array()) {
        cfg.fit.retain_all = false;
        r.get(*it, "fit", "retain_draws", cfg.fit.retain_cells);
      } else {
        r.report("fit.retain_draws", "expected \"all\", \"none\" or a list of cells");
      }
    }
  }

  if (auto it = root.find("report"); it != root.end() && r.object(*it, "report")) {
    const json& rep = *it;
    r.allowed_keys(rep, "report",
                   {"hist_lo", "hist_hi", "hist_width", "low_containment",
                    "render_maps"});
    r.get(rep, "report", "hist_lo", cfg.report.hist_lo);
    r.get(rep, "report", "hist_hi", cfg.report.hist_hi);
    r.get(rep, "report", "hist_width", cfg.report.hist_width);
    r.get(rep, "report", "low_containment", cfg.report.low_containment);
    r.get(rep, "report", "render_maps", cfg.report.render_maps);
  }
  return cfg;
}

void check_semantics(const RunConfig& cfg, std::vector<Diagnostic>& diags) {
  auto report = [&](const char* path, const std::string& msg) {
    diags.push_back({path, msg});
  };
  const auto& a = cfg.analysis;
  if (!(a.extreme_probability > 0.0 && a.extreme_probability < 1.0))
    report("analysis.extreme_probability", "must lie in (0, 1)");
  if (a.lead_hours.empty()) report("analysis.lead_hours", "must be nonempty");
  if (!(a.land_threshold >= 0.0 && a.land_threshold <= 1.0))
    report("analysis.land_threshold", "must lie in [0, 1]");

  const auto& m = cfg.mcmc;
  if (m.chains < 1) report("mcmc.chains", "must be >= 1");
  if (m.iterations < 1) report("mcmc.iterations", "must be >= 1");
  if (m.burn_in < 0 || m.burn_in >= m.iterations)
    report("mcmc.burn_in", "must satisfy 0 <= burn_in < iterations");
  if (m.thin < 1) report("mcmc.thin", "must be >= 1");
  if (m.adapt_window < 1) report("mcmc.adapt_window", "must be >= 1");
  if (!(m.target_acceptance > 0.0 && m.target_acceptance < 1.0))
    report("mcmc.target_acceptance", "must lie in (0, 1)");
  if (m.iterations > m.burn_in && m.thin >= 1 && m.draws_per_chain() < 2)
    report("mcmc", "settings keep fewer than 2 draws per chain");

  try {
    cfg.confidence_edges.validate();
  } catch (const Error& e) {
    report("confidence_edges", e.what());
  }

  if (cfg.jobs < 1) report("jobs", "must be >= 1");
  if (cfg.warning_exit_code < 0 || cfg.warning_exit_code > 255)
    report("warning_exit_code", "must lie in [0, 255]");

  if (cfg.variables.empty()) report("variables", "must be nonempty");
  for (const auto& v : cfg.variables)
    if (v != kVarT2m && v != kVarHeatIndex)
      report("variables", "unknown variable '" + v + "'");

  if (cfg.synthetic) {
    const auto& s = *cfg.synthetic;
    if (s.nlat < 1 || s.nlon < 1) report("synthetic.nlat", "grid must be nonempty");
    if (!(std::fabs(s.lat_first) <= 90.0 && std::fabs(s.lat_last) <= 90.0))
      report("synthetic.lat_first", "latitudes must lie in [-90, 90]");
    if (s.nlat > 1 && s.lat_first == s.lat_last)
      report("synthetic.lat_last", "must differ from lat_first");
    if (!(s.scale > 0.0)) report("synthetic.scale", "must be > 0");
    if (!(std::fabs(s.shape) < 1.0)) report("synthetic.shape", "must satisfy |shape| < 1");
    if (s.small_members < 10) report("synthetic.small_members", "must be >= 10");
    if (s.huge_members < 1) report("synthetic.huge_members", "must be >= 1");
    if (s.init_dates.empty()) report("synthetic.init_dates", "must be nonempty");
    for (const auto& d : s.init_dates) {
      try {
        if (!a.in_season(d))
          report("synthetic.init_dates", "date '" + d + "' is outside the season");
      } catch (const Error& e) {
        report("synthetic.init_dates", e.what());
      }
    }
    if (!(s.depression_min >= 0.0 && s.depression_max >= s.depression_min))
      report("synthetic.depression_min", "need 0 <= depression_min <= depression_max");
    if (s.land != "all" && s.land != "random")
      report("synthetic.land", "must be \"all\" or \"random\"");
  } else {
    if (cfg.inputs.empty()) report("inputs", "required when synthetic is absent");
    const bool need_dew = cfg.wants(kVarHeatIndex);
    std::set<std::filesystem::path> seen;
    for (const char* ens : {kEnsembleSmall, kEnsembleHuge, kEnsembleObserved}) {
      const std::string base = std::string("inputs.") + ens;
      auto it = cfg.inputs.find(ens);
      if (it == cfg.inputs.end()) {
        report("inputs", std::string("missing ensemble '") + ens + "'");
        continue;
      }
      if (it->second.t2m.empty()) diags.push_back({base + ".t2m", "no files"});
      if (need_dew && it->second.dewpoint.size() != it->second.t2m.size())
        diags.push_back({base + ".dewpoint", "must pair one-to-one with t2m"});
      for (const auto* list : {&it->second.t2m, &it->second.dewpoint}) {
        for (const auto& p : *list) {
          if (!std::filesystem::is_regular_file(p))
            diags.push_back({base, "input file not found: " + p.string()});
          if (!seen.insert(p.lexically_normal()).second)
            diags.push_back({base, "input listed twice: " + p.string()});
        }
      }
    }
    if (!cfg.land_mask)
      report("inputs.land_mask", "required when synthetic is absent");
    else if (!std::filesystem::is_regular_file(*cfg.land_mask))
      report("inputs.land_mask", "file not found: " + cfg.land_mask->string());
    if (cfg.land_mask && seen.contains(cfg.land_mask->lexically_normal()))
      report("inputs.land_mask", "also listed as an ensemble input");
    if (seen.contains(cfg.workspace.lexically_normal()))
      report("workspace", "coincides with an input file");
  }

  const auto& rep = cfg.report;
  if (!(rep.hist_hi > rep.hist_lo) || !(rep.hist_width > 0.0))
    report("report.hist_width", "need hist_lo < hist_hi and hist_width > 0");
  if (!(rep.low_containment > 0.0 && rep.low_containment <= 1.0))
    report("report.low_containment", "must lie in (0, 1]");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig parse_checked(const std::string& text,
                        const std::filesystem::path& base,
                        std::vector<Diagnostic>& diags) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    diags.push_back({"", std::string("not valid JSON: ") + e.what()});
    return {};
  }
  RunConfig cfg = parse_into(root, base, diags);
  check_semantics(cfg, diags);
  return cfg;
}

}  // namespace

Grid SyntheticConfig::grid() const {
  return Grid::uniform(nlat, nlon, lat_first, lat_last, 0.0);
}

std::vector<GevParams> SyntheticConfig::cell_params(double shift) const {
  const Grid g = grid();
  std::vector<GevParams> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = {location_base + location_lat_slope * std::fabs(g.latitude_of(i)) +
                  shift * scale,
              scale, shape};
  return out;
}

bool RunConfig::wants(const std::string& variable) const {
  return std::find(variables.begin(), variables.end(), variable) != variables.end();
}

std::vector<Diagnostic> validate_config_text(const std::string& text,
                                             const std::filesystem::path& base) {
  std::vector<Diagnostic> diags;
  parse_checked(text, base, diags);
  return diags;
}

std::vector<Diagnostic> validate_config(const std::filesystem::path& path) {
  return validate_config_text(read_text(path), path.parent_path());
}

RunConfig parse_run_config(const std::string& text,
                           const std::filesystem::path& base) {
  std::vector<Diagnostic> diags;
  RunConfig cfg = parse_checked(text, base, diags);
  if (!diags.empty()) fail(ErrorCode::kConfig, diagnostics_json(diags));
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig cfg = parse_run_config(read_text(path), path.parent_path());
  if (const char* ws = std::getenv("TAILCHECK_WORKSPACE"); ws && *ws)
    cfg.workspace = ws;
  if (const char* jobs = std::getenv("TAILCHECK_JOBS"); jobs && *jobs) {
    char* end = nullptr;
    const long n = std::strtol(jobs, &end, 10);
    if (*end != '\0' || n < 1)
      fail(ErrorCode::kConfig, "TAILCHECK_JOBS must be a positive integer");
    cfg.jobs = unsigned(n);
  }
  return cfg;
}

std::string diagnostics_json(const std::vector<Diagnostic>& diags) {
  json arr = json::array();
  for (const auto& d : diags) arr.push_back({{"path", d.path}, {"message", d.message}});
  return arr.dump();
}

}  // namespace tailcheck
