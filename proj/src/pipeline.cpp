#include "tailcheck/pipeline.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "tailcheck/error.hpp"
#include "tailcheck/extremes.hpp"
#include "tailcheck/heatindex.hpp"
#include "tailcheck/ingest.hpp"
#include "tailcheck/parallel.hpp"
#include "tailcheck/report.hpp"
#include "tailcheck/rng.hpp"

namespace tailcheck {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kSynthEnsembleStage = 31;
constexpr std::uint64_t kLandMaskStage = 32;

const char* const kEnsembles[] = {kEnsembleSmall, kEnsembleHuge, kEnsembleObserved};

std::string two_digits(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu", i);
  return buf;
}

// Where every stage reads and writes inside the workspace.
struct Layout {
  const RunConfig& cfg;

  fs::path ws() const { return cfg.workspace; }
  fs::path synth_block(const std::string& ens, const std::string& var,
                       std::size_t i) const {
    return ws() / "synth" / (ens + "_" + var + "_" + two_digits(i) + ".tcb");
  }
  fs::path hi_block(const std::string& ens, std::size_t i) const {
    return ws() / "heat_index" / (ens + "_heat_index_" + two_digits(i) + ".tcb");
  }
  fs::path maxima(const std::string& ens, const std::string& var) const {
    return ws() / "extract" / (ens + "_" + var + "_maxima.tcb");
  }
  fs::path posterior(const std::string& var) const {
    return ws() / "fit" / (var + "_posterior.tcb");
  }
  fs::path draws(const std::string& var) const {
    return ws() / "fit" / (var + "_draws.tcb");
  }
  fs::path comparison(const std::string& var) const {
    return ws() / "compare" / (var + "_comparison.tcb");
  }
  fs::path fractions(const std::string& var) const {
    return ws() / "compare" / (var + "_category_fractions.csv");
  }
  fs::path report(const std::string& name) const { return ws() / "report" / name; }
  fs::path land_mask() const {
    return cfg.synthetic ? ws() / "synth" / "land_mask.tcb" : *cfg.land_mask;
  }

  std::size_t block_count(const std::string& ens) const {
    if (cfg.synthetic) return cfg.synthetic->init_dates.size();
    return cfg.inputs.at(ens).t2m.size();
  }
  std::vector<fs::path> blocks(const std::string& ens, const std::string& var) const {
    std::vector<fs::path> out;
    for (std::size_t i = 0; i < block_count(ens); ++i) {
      if (var == kVarHeatIndex)
        out.push_back(hi_block(ens, i));
      else if (cfg.synthetic)
        out.push_back(synth_block(ens, var, i));
      else
        out.push_back(var == kVarT2m ? cfg.inputs.at(ens).t2m[i]
                                     : cfg.inputs.at(ens).dewpoint[i]);
    }
    return out;
  }
};

class StageWriter {
 public:
  StageWriter(const RunConfig& cfg, Stage stage) : cfg_(cfg) {
    report_.stage = stage;
  }

  void record(const fs::path& path) {
    ManifestEntry e;
    e.path = fs::relative(path, cfg_.workspace).generic_string();
    e.sha256 = sha256_file(path);
    e.bytes = fs::file_size(path);
    report_.files.push_back(std::move(e));
  }
  void warn(const std::string& key, std::uint64_t n) { report_.warnings[key] += n; }
  StageReport done() {
    std::sort(report_.files.begin(), report_.files.end(),
              [](const auto& a, const auto& b) { return a.path < b.path; });
    return std::move(report_);
  }

 private:
  const RunConfig& cfg_;
  StageReport report_;
};

CellMask land_cells(const Layout& layout, const Grid& grid) {
  const LandMask mask = read_land_mask(layout.land_mask());
  return land_selector(mask, grid, layout.cfg.analysis.land_threshold);
}

StageReport stage_synth(const RunConfig& cfg) {
  if (!cfg.synthetic) fail(ErrorCode::kConfig, "synth stage needs a synthetic section");
  const Layout layout{cfg};
  const SyntheticConfig& sc = *cfg.synthetic;
  StageWriter w(cfg, Stage::kSynth);
  fs::create_directories(cfg.workspace / "synth");

  SyntheticLayout shape;
  shape.init_dates = sc.init_dates;
  shape.lead_hours = cfg.analysis.lead_hours;
  shape.depression_min = sc.depression_min;
  shape.depression_max = sc.depression_max;

  for (std::size_t e = 0; e < 3; ++e) {
    const std::string ens = kEnsembles[e];
    SyntheticSpec spec;
    spec.grid = sc.grid();
    spec.cell_params =
        sc.cell_params(ens == kEnsembleHuge ? sc.huge_location_shift : 0.0);
    spec.n_members = ens == kEnsembleSmall  ? sc.small_members
                     : ens == kEnsembleHuge ? sc.huge_members
                                            : 1;
    spec.seed = mix_seed(cfg.seed, e, kSynthEnsembleStage);
    SyntheticBlocks blocks = synth_blocks(spec, shape, cfg.jobs);
    for (std::size_t i = 0; i < blocks.t2m.size(); ++i) {
      const fs::path t = layout.synth_block(ens, kVarT2m, i);
      write_block(blocks.t2m[i], t);
      w.record(t);
      if (cfg.wants(kVarHeatIndex)) {
        const fs::path d = layout.synth_block(ens, kVarDewpoint, i);
        write_block(blocks.dewpoint[i], d);
        w.record(d);
      }
    }
  }

  const Grid grid = sc.grid();
  std::vector<double> fraction(grid.size(), 1.0);
  if (sc.land == "random") {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      Xoshiro256 rng(mix_seed(cfg.seed, i, kLandMaskStage));
      fraction[i] = std::floor(rng.uniform() * 100.0) / 100.0;
    }
  }
  write_land_mask(LandMask(grid, std::move(fraction)), layout.land_mask());
  w.record(layout.land_mask());
  return w.done();
}

StageReport stage_heat_index(const RunConfig& cfg) {
  const Layout layout{cfg};
  StageWriter w(cfg, Stage::kHeatIndex);
  fs::create_directories(cfg.workspace / "heat_index");
  for (const char* ens : kEnsembles) {
    const auto t2m = layout.blocks(ens, kVarT2m);
    const auto dew = layout.blocks(ens, kVarDewpoint);
    for (std::size_t i = 0; i < t2m.size(); ++i) {
      auto result = heat_index_block(read_block(t2m[i]), read_block(dew[i]));
      const fs::path out = layout.hi_block(ens, i);
      write_block(result.block, out);
      w.record(out);
      w.warn("dewpoint_clamped", result.clamped);
    }
  }
  return w.done();
}

StageReport stage_extract(const RunConfig& cfg) {
  const Layout layout{cfg};
  StageWriter w(cfg, Stage::kExtract);
  fs::create_directories(cfg.workspace / "extract");
  for (const char* ens : kEnsembles) {
    for (const auto& var : cfg.variables) {
      const auto files = layout.blocks(ens, var);
      const MemberMaxima maxima = extract_member_maxima(files, cfg.analysis);
      const fs::path out = layout.maxima(ens, var);
      write_maxima(maxima, out);
      w.record(out);
    }
  }
  return w.done();
}

StageReport stage_fit(const RunConfig& cfg, std::uint64_t& not_converged) {
  const Layout layout{cfg};
  StageWriter w(cfg, Stage::kFit);
  fs::create_directories(cfg.workspace / "fit");
  for (std::size_t v = 0; v < cfg.variables.size(); ++v) {
    const std::string& var = cfg.variables[v];
    const MemberMaxima small = read_maxima(layout.maxima(kEnsembleSmall, var));
    const CellMask land = land_cells(layout, small.grid);
    // Each variable gets its own seed stream.
    const FitOutcome fit =
        fit_cells(small, land, cfg.mcmc, mix_seed(cfg.seed, v, kFitStage), cfg.jobs);
    write_fields(posterior_summary_fields(fit, cfg.analysis.extreme_probability, var),
                 layout.posterior(var));
    w.record(layout.posterior(var));
    write_container(posterior_draws_container(fit, cfg.fit, var), layout.draws(var));
    w.record(layout.draws(var));
    w.warn(var + ".fit_failed", fit.failed);
    w.warn(var + ".not_converged", fit.not_converged);
    not_converged += fit.not_converged;
  }
  return w.done();
}

StageReport stage_compare(const RunConfig& cfg) {
  const Layout layout{cfg};
  StageWriter w(cfg, Stage::kCompare);
  fs::create_directories(cfg.workspace / "compare");
  const double p = cfg.analysis.extreme_probability;
  for (const auto& var : cfg.variables) {
    const Container draws = read_container(layout.draws(var));
    const MemberMaxima huge = read_maxima(layout.maxima(kEnsembleHuge, var));
    require_same_grid(draws.grid, huge.grid, "compare");
    const StorylineResult reference = storyline_field(huge, p, cfg.jobs);
    const ComparisonResult result = compare_thresholds(
        threshold_draws_from(draws, p), reference.field, cfg.confidence_edges);
    write_fields(comparison_fields(result, var), layout.comparison(var));
    w.record(layout.comparison(var));

    const CellMask land = land_cells(layout, result.grid);
    write_category_fractions_csv(category_fractions(result, land, result.grid),
                                 layout.fractions(var));
    w.record(layout.fractions(var));
    w.warn(var + ".reference_missing", reference.missing_cells);
  }
  return w.done();
}

StageReport stage_report(const RunConfig& cfg) {
  const Layout layout{cfg};
  StageWriter w(cfg, Stage::kReport);
  fs::create_directories(cfg.workspace / "report");
  const double p = cfg.analysis.extreme_probability;
  std::vector<std::pair<std::string, ExceedanceSummary>> rows;

  auto add_row = [&](const std::string& name, const Field& a, const Field& b,
                     const CellMask& sel) {
    try {
      rows.emplace_back(name, exceedance_report(a, b, sel, a.grid));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUndefinedFraction) throw;
      w.warn(name + ".empty_selection", 1);
    }
  };

  for (const auto& var : cfg.variables) {
    const MemberMaxima small = read_maxima(layout.maxima(kEnsembleSmall, var));
    const MemberMaxima huge = read_maxima(layout.maxima(kEnsembleHuge, var));
    const MemberMaxima observed = read_maxima(layout.maxima(kEnsembleObserved, var));
    const Grid& grid = small.grid;
    const CellMask land = land_cells(layout, grid);
    const Field small_max = ensemble_max_field(small);
    const Field huge_max = ensemble_max_field(huge);
    const Field obs_max = ensemble_max_field(observed);
    const Field storyline = storyline_field(huge, p, cfg.jobs).field;
    const ComparisonResult cmp = comparison_from_fields(read_fields(layout.comparison(var)));
    const Field gev_median(grid, cmp.gev_threshold, small.units);

    add_row(var + ":small_max_vs_observed", small_max, obs_max, land);
    add_row(var + ":huge_max_vs_observed", huge_max, obs_max, land);
    add_row(var + ":huge_max_vs_small_max", huge_max, small_max, land);
    add_row(var + ":storyline_vs_gev_median", storyline, gev_median, land);
    add_row(var + ":storyline_vs_observed", storyline, obs_max, land);

    CellMask low(grid.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i)
      low[i] = land[i] && !cmp.missing(i) &&
               cmp.probability[i] < cfg.report.low_containment;
    add_row(var + ":storyline_vs_observed_low_containment", storyline, obs_max, low);

    const fs::path fractions = layout.report(var + "_category_fractions.csv");
    write_category_fractions_csv(category_fractions(cmp, land, grid), fractions);
    w.record(fractions);

    if (var == kVarHeatIndex) {
      const auto edges = uniform_edges(cfg.report.hist_lo, cfg.report.hist_hi,
                                       cfg.report.hist_width);
      const JointHistogram hist = joint_histogram(obs_max, storyline, low, edges, edges);
      const fs::path hpath = layout.report("heat_index_joint_histogram.csv");
      write_histogram_csv(hist, hpath);
      w.record(hpath);

      const CategoryField from = risk_category_field(obs_max);
      const CategoryField to = risk_category_field(storyline);
      TransitionTable table;
      try {
        table = category_transition_table(from, to, low, grid);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefinedFraction) throw;
        for (auto& row : table.fraction) row.fill(kNaN);
        w.warn("heat_index.low_containment_empty", 1);
      }
      const fs::path tpath = layout.report("heat_index_transitions.csv");
      write_transition_csv(table, tpath);
      w.record(tpath);

      if (cfg.report.render_maps) {
        const auto& colors = risk_palette();
        for (const auto& [name, cat] :
             {std::pair{"heat_index_observed_risk.ppm", &from},
              std::pair{"heat_index_storyline_risk.ppm", &to}}) {
          render_categories(grid, cat->codes, colors, layout.report(name));
          w.record(layout.report(name));
        }
      }
    }

    if (cfg.report.render_maps) {
      const auto& colors = confidence_palette();
      const fs::path cpath = layout.report(var + "_containment.ppm");
      render_categories(grid, cmp.category, colors, cpath);
      w.record(cpath);
      const Field diff(grid, cmp.difference, small.units);
      const fs::path dpath = layout.report(var + "_gev_minus_reference.ppm");
      const double reach = std::max(1.0, std::max(std::fabs(LinearPalette::fit(diff).lo),
                                                  std::fabs(LinearPalette::fit(diff).hi)));
      render_map(diff, {-reach, reach}, dpath);
      w.record(dpath);
      const fs::path mpath = layout.report(var + "_huge_max.ppm");
      render_map(huge_max, LinearPalette::fit(huge_max), mpath);
      w.record(mpath);
    }
  }
  const fs::path summary = layout.report("summary.csv");
  write_exceedance_csv(rows, summary);
  w.record(summary);
  return w.done();
}

json stage_json(const StageReport& r) {
  json files = json::array();
  for (const auto& f : r.files)
    files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  json warnings = json::object();
  for (const auto& [k, v] : r.warnings) warnings[k] = v;
  return {{"files", files}, {"warnings", warnings}};
}

fs::path write_manifest(const RunConfig& cfg, const std::vector<StageReport>& stages,
                        bool merge) {
  const fs::path path = cfg.workspace / "manifest.json";
  json root = {{"format", "tailcheck-manifest-1"}, {"stages", json::object()}};
  if (merge && fs::exists(path)) {
    std::ifstream in(path);
    try {
      root = json::parse(in);
    } catch (const json::exception&) {
      fail(ErrorCode::kFormat, "existing manifest is not valid JSON");
    }
  }
  for (const auto& s : stages) root["stages"][to_string(s.stage)] = stage_json(s);
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write manifest " + path.string());
  out << root.dump(2) << '\n';
  out.flush();
  if (!out) fail(ErrorCode::kIo, "cannot write manifest " + path.string());
  return path;
}

StageReport run_stage_impl(const RunConfig& cfg, Stage stage,
                           std::uint64_t& not_converged) {
  switch (stage) {
    case Stage::kSynth: return stage_synth(cfg);
    case Stage::kHeatIndex: return stage_heat_index(cfg);
    case Stage::kExtract: return stage_extract(cfg);
    case Stage::kFit: return stage_fit(cfg, not_converged);
    case Stage::kCompare: return stage_compare(cfg);
    case Stage::kReport: return stage_report(cfg);
  }
  fail(ErrorCode::kArgument, "unknown stage");
}

}  // namespace

const char* to_string(Stage s) {
  switch (s) {
    case Stage::kSynth: return "synth";
    case Stage::kHeatIndex: return "heat-index";
    case Stage::kExtract: return "extract";
    case Stage::kFit: return "fit";
    case Stage::kCompare: return "compare";
    case Stage::kReport: return "report";
  }
  return "?";
}

std::optional<Stage> parse_stage(const std::string& name) {
  for (Stage s : {Stage::kSynth, Stage::kHeatIndex, Stage::kExtract, Stage::kFit,
                  Stage::kCompare, Stage::kReport})
    if (name == to_string(s)) return s;
  return std::nullopt;
}

std::vector<Stage> planned_stages(const RunConfig& cfg) {
  std::vector<Stage> out;
  if (cfg.synthetic) out.push_back(Stage::kSynth);
  if (cfg.wants(kVarHeatIndex)) out.push_back(Stage::kHeatIndex);
  for (Stage s : {Stage::kExtract, Stage::kFit, Stage::kCompare, Stage::kReport})
    out.push_back(s);
  return out;
}

PipelineResult run_pipeline(const RunConfig& cfg) {
  fs::create_directories(cfg.workspace);
  PipelineResult result;
  for (Stage s : planned_stages(cfg))
    result.stages.push_back(run_stage_impl(cfg, s, result.convergence_warnings));
  result.manifest_path = write_manifest(cfg, result.stages, false);
  return result;
}

PipelineResult run_single_stage(const RunConfig& cfg, Stage stage) {
  fs::create_directories(cfg.workspace);
  PipelineResult result;
  result.stages.push_back(run_stage_impl(cfg, stage, result.convergence_warnings));
  result.manifest_path = write_manifest(cfg, result.stages, true);
  return result;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot hash " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::kIo, "sha256 unavailable");
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, std::size_t(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

FitOutcome fit_cells(const MemberMaxima& maxima,
                     const std::vector<std::uint8_t>& selector, McmcConfig mcmc,
                     std::uint64_t seed, unsigned jobs) {
  mcmc.validate();
  if (selector.size() != maxima.grid.size())
    fail(ErrorCode::kShape, "selector size does not match grid");
  FitOutcome out;
  out.grid = maxima.grid;
  out.units = maxima.units;
  out.posteriors.resize(maxima.grid.size());
  std::vector<std::uint8_t> failed(maxima.grid.size(), 0);
  parallel_for(maxima.grid.size(), jobs, [&](std::size_t i) {
    if (!selector[i] || maxima.cell_missing(i)) return;
    McmcConfig cell_cfg = mcmc;
    cell_cfg.seed = mix_seed(seed, i, kFitStage);
    try {
      out.posteriors[i] = bayes_fit(maxima.cell(i), cell_cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kFit && e.code() != ErrorCode::kArgument) throw;
      failed[i] = 1;
    }
  });
  for (std::size_t i = 0; i < out.posteriors.size(); ++i) {
    out.failed += failed[i];
    if (!out.posteriors[i]) continue;
    ++out.fitted;
    if (!out.posteriors[i]->diagnostics.converged) ++out.not_converged;
  }
  return out;
}

FieldSet posterior_summary_fields(const FitOutcome& fit, double p,
                                  const std::string& variable) {
  const std::size_t cells = fit.grid.size();
  FieldSet set;
  set.grid = fit.grid;
  set.variable = variable;
  const char* quantities[] = {"location", "scale", "shape", "threshold"};
  const char* stats[] = {"q05", "median", "q95"};
  for (const char* q : quantities)
    for (const char* s : stats) set.names.push_back(std::string(q) + "_" + s);
  set.names.insert(set.names.end(), {"max_rhat", "acceptance", "converged"});
  std::vector<std::vector<double>> layers(set.names.size(),
                                          std::vector<double>(cells, kNaN));
  for (std::size_t i = 0; i < cells; ++i) {
    if (!fit.posteriors[i]) continue;
    const PosteriorSummary s = summarize(*fit.posteriors[i], p);
    const Interval* iv[] = {&s.location, &s.scale, &s.shape, &s.threshold};
    std::size_t l = 0;
    for (const Interval* v : iv) {
      layers[l++][i] = v->q05;
      layers[l++][i] = v->median;
      layers[l++][i] = v->q95;
    }
    layers[l++][i] = s.max_rhat;
    layers[l++][i] = s.mean_acceptance;
    layers[l++][i] = s.converged ? 1.0 : 0.0;
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const bool data_units = set.names[l].rfind("shape", 0) != 0 && l < 12;
    set.fields.emplace_back(fit.grid, std::move(layers[l]), data_units ? fit.units : "1");
  }
  return set;
}

Container posterior_draws_container(const FitOutcome& fit, const FitConfig& retain,
                                    const std::string& variable) {
  const std::size_t cells = fit.grid.size();
  std::size_t n_draws = 0;
  for (const auto& p : fit.posteriors)
    if (p) n_draws = std::max(n_draws, p->draws.size());
  std::vector<std::uint8_t> keep(cells, retain.retain_all ? 1 : 0);
  for (std::size_t c : retain.retain_cells)
    if (c < cells) keep[c] = 1;

  Container c;
  c.kind = ContainerKind::kDraws;
  c.grid = fit.grid;
  c.variable = variable;
  c.units = fit.units;
  c.layer_names = {"location", "scale", "shape"};
  c.layer_units = {fit.units, fit.units, "1"};
  c.n_members = std::max<std::size_t>(n_draws, 1);
  c.payload.assign(c.expected_payload(), std::numeric_limits<float>::quiet_NaN());
  for (std::size_t i = 0; i < cells; ++i) {
    if (!keep[i] || !fit.posteriors[i]) continue;
    const auto& draws = fit.posteriors[i]->draws;
    if (draws.size() != n_draws) continue;
    for (std::size_t d = 0; d < n_draws; ++d) {
      c.payload[(0 * c.n_members + d) * cells + i] = float(draws[d].location);
      c.payload[(1 * c.n_members + d) * cells + i] = float(draws[d].scale);
      c.payload[(2 * c.n_members + d) * cells + i] = float(draws[d].shape);
    }
  }
  return c;
}

std::vector<std::vector<double>> threshold_draws_from(const Container& draws, double p) {
  if (draws.kind != ContainerKind::kDraws || draws.layer_names.size() != 3)
    fail(ErrorCode::kFormat, "not a posterior draws container");
  const std::size_t cells = draws.grid.size();
  const std::size_t n = draws.n_members;
  std::vector<std::vector<double>> out(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    std::vector<double> z;
    z.reserve(n);
    for (std::size_t d = 0; d < n; ++d) {
      const GevParams theta{draws.payload[(0 * n + d) * cells + i],
                            draws.payload[(1 * n + d) * cells + i],
                            draws.payload[(2 * n + d) * cells + i]};
      if (std::isnan(theta.location) || std::isnan(theta.scale) ||
          std::isnan(theta.shape) || !(theta.scale > 0.0)) {
        z.clear();
        break;
      }
      z.push_back(gev_quantile(p, theta));
    }
    out[i] = std::move(z);
  }
  return out;
}

FieldSet comparison_fields(const ComparisonResult& r, const std::string& variable) {
  FieldSet set;
  set.grid = r.grid;
  set.variable = variable;
  set.names = {"probability", "category", "difference", "gev_threshold", "reference"};
  std::vector<double> category(r.category.size());
  for (std::size_t i = 0; i < category.size(); ++i)
    category[i] = r.category[i] < 0 ? kNaN : double(r.category[i]);
  set.fields.emplace_back(r.grid, r.probability, "1");
  set.fields.emplace_back(r.grid, category, "category");
  set.fields.emplace_back(r.grid, r.difference, r.units);
  set.fields.emplace_back(r.grid, r.gev_threshold, r.units);
  set.fields.emplace_back(r.grid, r.reference, r.units);
  return set;
}

ComparisonResult comparison_from_fields(const FieldSet& set) {
  ComparisonResult r;
  r.grid = set.grid;
  r.probability = set.at("probability").values;
  r.difference = set.at("difference").values;
  r.gev_threshold = set.at("gev_threshold").values;
  r.reference = set.at("reference").values;
  r.units = set.at("reference").units;
  for (double c : set.at("category").values)
    r.category.push_back(std::isnan(c) ? std::int8_t(-1) : std::int8_t(c));
  return r;
}

}  // namespace tailcheck
