#include "tailcheck/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "tailcheck/error.hpp"
#include "tailcheck/parallel.hpp"

namespace tailcheck {

MonthDay parse_month_day(const std::string& text) {
  int y = 0, m = 0, d = 0;
  char tail = 0;
  MonthDay md;
  if (std::sscanf(text.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) == 3) {
    md = {m, d};
  } else if (std::sscanf(text.c_str(), "%d-%d%c", &m, &d, &tail) == 2) {
    md = {m, d};
  } else {
    fail(ErrorCode::kArgument, "cannot parse date '" + text + "'");
  }
  if (md.month < 1 || md.month > 12 || md.day < 1 || md.day > 31)
    fail(ErrorCode::kArgument, "date out of range: '" + text + "'");
  return md;
}

void AnalysisConfig::validate() const {
  if (!(extreme_probability > 0.0 && extreme_probability < 1.0))
    fail(ErrorCode::kConfig, "extreme_probability must lie in (0, 1)");
  if (lead_hours.empty()) fail(ErrorCode::kConfig, "lead_hours is empty");
  if (!(land_threshold >= 0.0 && land_threshold <= 1.0))
    fail(ErrorCode::kConfig, "land_threshold must lie in [0, 1]");
}

bool AnalysisConfig::in_season(const std::string& init_date) const {
  const MonthDay md = parse_month_day(init_date);
  if (season_start <= season_end)
    return md >= season_start && md <= season_end;
  return md >= season_start || md <= season_end;
}

MaximaAccumulator::MaximaAccumulator(AnalysisConfig config)
    : config_(std::move(config)) {
  config_.validate();
}

void MaximaAccumulator::add(const EnsembleBlock& block) {
  if (!started_) {
    grid_ = block.grid();
    variable_ = block.variable();
    units_ = block.units();
    n_members_ = block.n_members();
    running_.assign(grid_.size() * n_members_,
                    -std::numeric_limits<float>::infinity());
    missing_.assign(grid_.size(), 0);
    started_ = true;
  } else {
    require_same_grid(grid_, block.grid(), "ensemble block");
    if (block.n_members() != n_members_)
      fail(ErrorCode::kShape, "ensemble blocks disagree on member count");
    if (block.variable() != variable_)
      fail(ErrorCode::kShape, "ensemble blocks disagree on variable");
  }

  std::set<int> present;
  for (const auto& t : block.times()) present.insert(t.lead_hours);
  for (int lead : config_.lead_hours) {
    if (!present.contains(lead))
      fail(ErrorCode::kConfig,
           "lead time " + std::to_string(lead) + "h missing from block");
  }
  const std::set<int> wanted(config_.lead_hours.begin(),
                             config_.lead_hours.end());

  const std::size_t cells = grid_.size();
  for (std::size_t t = 0; t < block.times().size(); ++t) {
    const TimeStep& step = block.times()[t];
    if (!wanted.contains(step.lead_hours) || !config_.in_season(step.init_date))
      continue;
    for (std::size_t m = 0; m < n_members_; ++m) {
      const auto layer = block.layer(t, m);
      for (std::size_t i = 0; i < cells; ++i) {
        const float v = layer[i];
        if (std::isnan(v)) {
          missing_[i] = 1;
          continue;
        }
        float& slot = running_[i * n_members_ + m];
        if (v > slot) slot = v;
      }
    }
    ++layers_;
  }
}

MemberMaxima MaximaAccumulator::finish() const {
  if (!started_ || layers_ == 0)
    fail(ErrorCode::kConfig, "no in-season layers matched the configuration");
  std::vector<double> values(running_.begin(), running_.end());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!missing_[i]) continue;
    std::fill_n(values.begin() + i * n_members_, n_members_,
                std::numeric_limits<double>::quiet_NaN());
  }
  return MemberMaxima(grid_, n_members_, std::move(values), variable_, units_);
}

MemberMaxima extract_member_maxima(std::span<const EnsembleBlock> blocks,
                                   const AnalysisConfig& config) {
  MaximaAccumulator acc(config);
  for (const auto& b : blocks) acc.add(b);
  return acc.finish();
}

MemberMaxima extract_member_maxima(
    std::span<const std::filesystem::path> block_files,
    const AnalysisConfig& config) {
  MaximaAccumulator acc(config);
  for (const auto& path : block_files) acc.add(read_block(path));
  return acc.finish();
}

double empirical_quantile(std::span<const double> values, double p) {
  if (values.empty()) fail(ErrorCode::kArgument, "quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0))
    fail(ErrorCode::kArgument, "quantile probability outside [0, 1]");
  for (double v : values)
    if (std::isnan(v)) fail(ErrorCode::kData, "NaN in quantile input");

  std::vector<double> x(values.begin(), values.end());
  const double pos = double(x.size() - 1) * p;  // zero-based h - 1
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - double(lo);
  std::nth_element(x.begin(), x.begin() + std::ptrdiff_t(lo), x.end());
  const double a = x[lo];
  if (frac == 0.0 || lo + 1 >= x.size()) return a;
  const double b = *std::min_element(x.begin() + std::ptrdiff_t(lo) + 1, x.end());
  return a + frac * (b - a);
}

StorylineResult storyline_field(const MemberMaxima& maxima, double p,
                                unsigned jobs) {
  if (!(p >= 0.0 && p <= 1.0))
    fail(ErrorCode::kArgument, "storyline probability outside [0, 1]");
  const std::size_t cells = maxima.grid.size();
  std::vector<double> out(cells, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint8_t> failed(cells, 0);
  parallel_for(cells, jobs, [&](std::size_t i) {
    try {
      out[i] = empirical_quantile(maxima.cell(i), p);
    } catch (const Error&) {
      failed[i] = 1;
    }
  });
  StorylineResult r{Field(maxima.grid, std::move(out), maxima.units), 0};
  for (auto f : failed) r.missing_cells += f;
  return r;
}

Field ensemble_max_field(const MemberMaxima& maxima) {
  const std::size_t cells = maxima.grid.size();
  std::vector<double> out(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (double v : maxima.cell(i)) {
      if (std::isnan(v)) {
        best = std::numeric_limits<double>::quiet_NaN();
        break;
      }
      best = std::max(best, v);
    }
    out[i] = best;
  }
  return Field(maxima.grid, std::move(out), maxima.units);
}

}  // namespace tailcheck
