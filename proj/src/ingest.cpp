#include "tailcheck/ingest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "tailcheck/error.hpp"
#include "tailcheck/parallel.hpp"
#include "tailcheck/rng.hpp"

namespace tailcheck {

namespace {

using nlohmann::json;

constexpr std::uint64_t kMaxHeaderBytes = 64ull << 20;
constexpr std::uint64_t kMaxPayloadCount = 1ull << 40;

std::size_t checked_mul(std::size_t a, std::size_t b) {
  std::size_t out = 0;
  if (__builtin_mul_overflow(a, b, &out) || out > kMaxPayloadCount)
    fail(ErrorCode::kOverflow, "container dimensions overflow");
  return out;
}

const char* kind_name(ContainerKind k) {
  switch (k) {
    case ContainerKind::kEnsemble: return "ensemble";
    case ContainerKind::kMaxima: return "maxima";
    case ContainerKind::kFields: return "fields";
    case ContainerKind::kDraws: return "draws";
  }
  return "?";
}

ContainerKind kind_from(const std::string& s) {
  if (s == "ensemble") return ContainerKind::kEnsemble;
  if (s == "maxima") return ContainerKind::kMaxima;
  if (s == "fields") return ContainerKind::kFields;
  if (s == "draws") return ContainerKind::kDraws;
  fail(ErrorCode::kFormat, "unknown container kind '" + s + "'");
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

void spit(const std::filesystem::path& path,
          const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  out.flush();
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

template <typename T>
T header_get(const json& h, const char* key) {
  auto it = h.find(key);
  if (it == h.end())
    fail(ErrorCode::kFormat, std::string("header missing key '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::kFormat, std::string("header key '") + key + "' has wrong type");
  }
}

}  // namespace

bool is_known_variable(const std::string& name) {
  return name == kVarT2m || name == kVarDewpoint || name == kVarHeatIndex;
}

MemberMaxima::MemberMaxima(Grid g, std::size_t members, std::vector<double> v,
                           std::string var, std::string u)
    : grid(std::move(g)), n_members(members), values(std::move(v)),
      variable(std::move(var)), units(std::move(u)) {
  if (n_members == 0) fail(ErrorCode::kArgument, "maxima need members");
  if (values.size() != grid.size() * n_members)
    fail(ErrorCode::kShape, "maxima value count does not match grid");
}

bool MemberMaxima::cell_missing(std::size_t i) const {
  for (double x : cell(i))
    if (std::isnan(x)) return true;
  return false;
}

EnsembleBlock::EnsembleBlock(Grid grid, std::string variable,
                             std::string units, std::size_t n_members,
                             std::vector<TimeStep> times,
                             std::vector<float> values)
    : grid_(std::move(grid)), variable_(std::move(variable)),
      units_(std::move(units)), n_members_(n_members),
      times_(std::move(times)), values_(std::move(values)) {
  if (n_members_ == 0) fail(ErrorCode::kArgument, "block has no members");
  if (times_.empty()) fail(ErrorCode::kArgument, "block has no time steps");
  if (!is_known_variable(variable_))
    fail(ErrorCode::kArgument, "unknown variable '" + variable_ + "'");
  const std::size_t want =
      checked_mul(checked_mul(times_.size(), n_members_), grid_.size());
  if (values_.size() != want)
    fail(ErrorCode::kShape, "block value count does not match dimensions");
}

std::span<const float> EnsembleBlock::layer(std::size_t t,
                                            std::size_t member) const {
  const std::size_t cells = grid_.size();
  return {values_.data() + (t * n_members_ + member) * cells, cells};
}

Field EnsembleBlock::field(std::size_t t, std::size_t member) const {
  auto l = layer(t, member);
  return Field(grid_, std::vector<double>(l.begin(), l.end()), units_);
}

bool EnsembleBlock::operator==(const EnsembleBlock& o) const {
  if (!(grid_ == o.grid_) || variable_ != o.variable_ || units_ != o.units_ ||
      n_members_ != o.n_members_ || times_ != o.times_ ||
      values_.size() != o.values_.size())
    return false;
  // Bitwise so that NaN cells compare equal.
  return std::memcmp(values_.data(), o.values_.data(),
                     values_.size() * sizeof(float)) == 0;
}

std::size_t Container::expected_payload() const {
  const std::size_t cells = checked_mul(grid.nlat(), grid.nlon());
  switch (kind) {
    case ContainerKind::kEnsemble:
      return checked_mul(checked_mul(times.size(), n_members), cells);
    case ContainerKind::kMaxima:
      return checked_mul(n_members, cells);
    case ContainerKind::kFields:
      return checked_mul(layer_names.size(), cells);
    case ContainerKind::kDraws:
      return checked_mul(checked_mul(layer_names.size(), n_members), cells);
  }
  return 0;
}

std::vector<std::uint8_t> encode_container(const Container& c) {
  if (c.payload.size() != c.expected_payload())
    fail(ErrorCode::kShape, "container payload does not match dimensions");
  json h;
  h["format_version"] = 1;
  h["kind"] = kind_name(c.kind);
  h["variable"] = c.variable;
  h["units"] = c.units;
  h["nlat"] = c.grid.nlat();
  h["nlon"] = c.grid.nlon();
  h["latitudes"] = c.grid.latitudes();
  h["longitudes"] = c.grid.longitudes();
  h["n_members"] = c.n_members;
  json times = json::array();
  for (const auto& t : c.times)
    times.push_back({{"init", t.init_date}, {"lead_hours", t.lead_hours}});
  h["times"] = times;
  h["layer_names"] = c.layer_names;
  if (!c.layer_units.empty()) {
    if (c.layer_units.size() != c.layer_names.size())
      fail(ErrorCode::kShape, "layer units and names differ in count");
    h["layer_units"] = c.layer_units;
  }
  h["payload_count"] = c.payload.size();
  const std::string text = h.dump();

  std::vector<std::uint8_t> out;
  out.reserve(16 + text.size() + 4 * c.payload.size());
  out.insert(out.end(), kContainerMagic, kContainerMagic + 8);
  put_u64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  for (float f : c.payload) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(bits >> (8 * i)));
  }
  return out;
}

Container decode_container(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kContainerMagic, 8) != 0)
    fail(ErrorCode::kFormat, "not a tailcheck container (bad magic)");
  if (bytes.size() < 16) fail(ErrorCode::kTruncated, "container header truncated");
  const std::uint64_t hlen = get_u64(bytes.data() + 8);
  if (hlen > kMaxHeaderBytes)
    fail(ErrorCode::kOverflow, "container header length implausible");
  if (hlen > bytes.size() - 16)
    fail(ErrorCode::kTruncated, "container header truncated");

  json h;
  try {
    h = json::parse(bytes.begin() + 16, bytes.begin() + 16 + hlen);
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("malformed container header: ") + e.what());
  }
  if (!h.is_object()) fail(ErrorCode::kFormat, "container header not an object");
  if (header_get<int>(h, "format_version") != 1)
    fail(ErrorCode::kFormat, "unsupported container version");

  Container c;
  c.kind = kind_from(header_get<std::string>(h, "kind"));
  c.variable = header_get<std::string>(h, "variable");
  c.units = header_get<std::string>(h, "units");
  const auto nlat = header_get<std::uint64_t>(h, "nlat");
  const auto nlon = header_get<std::uint64_t>(h, "nlon");
  auto lats = header_get<std::vector<double>>(h, "latitudes");
  auto lons = header_get<std::vector<double>>(h, "longitudes");
  if (lats.size() != nlat || lons.size() != nlon)
    fail(ErrorCode::kFormat, "axis lengths disagree with nlat/nlon");
  try {
    c.grid = Grid(std::move(lats), std::move(lons));
  } catch (const Error& e) {
    fail(ErrorCode::kFormat, std::string("invalid grid in header: ") + e.what());
  }
  c.n_members = header_get<std::uint64_t>(h, "n_members");
  for (const auto& t : header_get<json>(h, "times")) {
    TimeStep step;
    step.init_date = header_get<std::string>(t, "init");
    step.lead_hours = header_get<int>(t, "lead_hours");
    c.times.push_back(std::move(step));
  }
  c.layer_names = header_get<std::vector<std::string>>(h, "layer_names");
  if (h.contains("layer_units")) {
    c.layer_units = header_get<std::vector<std::string>>(h, "layer_units");
    if (c.layer_units.size() != c.layer_names.size())
      fail(ErrorCode::kFormat, "layer_units disagrees with layer_names");
  }
  const auto declared = header_get<std::uint64_t>(h, "payload_count");
  const std::size_t count = c.expected_payload();
  if (declared != count)
    fail(ErrorCode::kFormat, "payload_count disagrees with dimensions");

  const std::size_t body = bytes.size() - 16 - hlen;
  if (body / 4 < count || (body < 4 * count))
    fail(ErrorCode::kTruncated, "container payload truncated");
  if (body != 4 * count)
    fail(ErrorCode::kFormat, "trailing bytes after container payload");
  c.payload.resize(count);
  const std::uint8_t* p = bytes.data() + 16 + hlen;
  for (std::size_t i = 0; i < count; ++i, p += 4) {
    const std::uint32_t bits = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
                               std::uint32_t(p[2]) << 16 |
                               std::uint32_t(p[3]) << 24;
    c.payload[i] = std::bit_cast<float>(bits);
  }
  return c;
}

void write_container(const Container& c, const std::filesystem::path& path) {
  spit(path, encode_container(c));
}

Container read_container(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  return decode_container(bytes);
}

EnsembleBlock read_block(const std::filesystem::path& path) {
  Container c = read_container(path);
  if (c.kind != ContainerKind::kEnsemble)
    fail(ErrorCode::kFormat, path.string() + " is not an ensemble block");
  try {
    return EnsembleBlock(std::move(c.grid), std::move(c.variable),
                         std::move(c.units), c.n_members, std::move(c.times),
                         std::move(c.payload));
  } catch (const Error& e) {
    fail(ErrorCode::kFormat, std::string("invalid block: ") + e.what());
  }
}

void write_block(const EnsembleBlock& block,
                 const std::filesystem::path& path) {
  if (block.n_members() == 0 || block.times().empty())
    fail(ErrorCode::kArgument, "refusing to write an empty block");
  Container c;
  c.kind = ContainerKind::kEnsemble;
  c.grid = block.grid();
  c.variable = block.variable();
  c.units = block.units();
  c.n_members = block.n_members();
  c.times = block.times();
  c.payload = block.values();
  write_container(c, path);
}

MemberMaxima read_maxima(const std::filesystem::path& path) {
  Container c = read_container(path);
  if (c.kind != ContainerKind::kMaxima)
    fail(ErrorCode::kFormat, path.string() + " is not a maxima file");
  const std::size_t cells = c.grid.size();
  if (c.n_members == 0) fail(ErrorCode::kFormat, "maxima file has no members");
  std::vector<double> values(c.payload.size());
  for (std::size_t m = 0; m < c.n_members; ++m)
    for (std::size_t i = 0; i < cells; ++i)
      values[i * c.n_members + m] = c.payload[m * cells + i];
  return MemberMaxima(std::move(c.grid), c.n_members, std::move(values),
                      std::move(c.variable), std::move(c.units));
}

void write_maxima(const MemberMaxima& maxima,
                  const std::filesystem::path& path) {
  Container c;
  c.kind = ContainerKind::kMaxima;
  c.grid = maxima.grid;
  c.variable = maxima.variable;
  c.units = maxima.units;
  c.n_members = maxima.n_members;
  const std::size_t cells = maxima.grid.size();
  c.payload.resize(cells * maxima.n_members);
  for (std::size_t m = 0; m < maxima.n_members; ++m)
    for (std::size_t i = 0; i < cells; ++i)
      c.payload[m * cells + i] =
          static_cast<float>(maxima.values[i * maxima.n_members + m]);
  write_container(c, path);
}

const Field& FieldSet::at(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    fail(ErrorCode::kFormat, "field set has no layer '" + name + "'");
  return fields[std::size_t(it - names.begin())];
}

FieldSet read_fields(const std::filesystem::path& path) {
  Container c = read_container(path);
  if (c.kind != ContainerKind::kFields)
    fail(ErrorCode::kFormat, path.string() + " is not a field file");
  FieldSet set;
  set.grid = c.grid;
  set.variable = c.variable;
  set.names = c.layer_names;
  const std::size_t cells = c.grid.size();
  for (std::size_t l = 0; l < c.layer_names.size(); ++l) {
    std::vector<double> v(c.payload.begin() + l * cells,
                          c.payload.begin() + (l + 1) * cells);
    set.fields.emplace_back(c.grid, std::move(v),
                            c.layer_units.empty() ? c.units : c.layer_units[l]);
  }
  return set;
}

void write_fields(const FieldSet& set, const std::filesystem::path& path) {
  if (set.names.size() != set.fields.size())
    fail(ErrorCode::kShape, "field names and layers differ in count");
  Container c;
  c.kind = ContainerKind::kFields;
  c.grid = set.grid;
  c.variable = set.variable;
  c.units = set.fields.empty() ? "" : set.fields.front().units;
  c.layer_names = set.names;
  for (const auto& f : set.fields) c.layer_units.push_back(f.units);
  for (const auto& f : set.fields) {
    require_same_grid(f.grid, set.grid, "field set");
    for (double v : f.values) c.payload.push_back(static_cast<float>(v));
  }
  write_container(c, path);
}

LandMask read_land_mask(const std::filesystem::path& path) {
  FieldSet set = read_fields(path);
  const Field& f = set.at("land_fraction");
  return LandMask(f.grid, f.values);
}

void write_land_mask(const LandMask& mask, const std::filesystem::path& path) {
  FieldSet set;
  set.grid = mask.grid;
  set.variable = "land_fraction";
  set.names = {"land_fraction"};
  set.fields.emplace_back(mask.grid, mask.land_fraction, "1");
  write_fields(set, path);
}

void SyntheticSpec::validate() const {
  if (n_members == 0) fail(ErrorCode::kArgument, "synthetic spec needs members");
  if (cell_params.size() != grid.size())
    fail(ErrorCode::kShape, "one GEV parameter set per cell required");
  for (const auto& p : cell_params) tailcheck::validate(p);
}

MemberMaxima synth_member_maxima(const SyntheticSpec& spec, unsigned jobs) {
  spec.validate();
  const std::size_t n = spec.n_members;
  std::vector<double> values(spec.grid.size() * n);
  parallel_for(spec.grid.size(), jobs, [&](std::size_t cell) {
    Xoshiro256 rng(mix_seed(spec.seed, cell, kSynthStage));
    const GevParams& theta = spec.cell_params[cell];
    for (std::size_t m = 0; m < n; ++m)
      values[cell * n + m] = gev_quantile(rng.uniform(), theta);
  });
  return MemberMaxima(spec.grid, n, std::move(values), spec.variable, "degC");
}

GevParams max_stable_component(const GevParams& target, std::size_t count) {
  validate(target);
  if (count == 0) fail(ErrorCode::kArgument, "component count must be > 0");
  const double k = double(count);
  if (std::fabs(target.shape) < kGumbelShapeTolerance)
    return {target.location - target.scale * std::log(k), target.scale,
            target.shape};
  const double shrink = std::pow(k, -target.shape);
  return {target.location - target.scale * (1.0 - shrink) / target.shape,
          target.scale * shrink, target.shape};
}

SyntheticBlocks synth_blocks(const SyntheticSpec& spec,
                             const SyntheticLayout& layout, unsigned jobs) {
  spec.validate();
  if (layout.init_dates.empty() || layout.lead_hours.empty())
    fail(ErrorCode::kArgument, "synthetic layout needs dates and lead hours");
  if (!(layout.depression_min >= 0.0 &&
        layout.depression_max >= layout.depression_min))
    fail(ErrorCode::kArgument, "invalid dewpoint depression range");

  const std::size_t cells = spec.grid.size();
  const std::size_t members = spec.n_members;
  const std::size_t n_dates = layout.init_dates.size();
  const std::size_t n_leads = layout.lead_hours.size();
  const std::size_t layers = n_dates * n_leads;
  const std::size_t per_block = checked_mul(checked_mul(n_leads, members), cells);

  std::vector<std::vector<float>> t2m(n_dates, std::vector<float>(per_block));
  std::vector<std::vector<float>> dew(n_dates, std::vector<float>(per_block));

  parallel_for(cells, jobs, [&](std::size_t cell) {
    const GevParams component =
        max_stable_component(spec.cell_params[cell], layers);
    Xoshiro256 rng(mix_seed(spec.seed, cell, kSynthLayerStage));
    Xoshiro256 dew_rng(mix_seed(spec.seed, cell, kSynthDewpointStage));
    const double span = layout.depression_max - layout.depression_min;
    for (std::size_t m = 0; m < members; ++m) {
      for (std::size_t d = 0; d < n_dates; ++d) {
        for (std::size_t l = 0; l < n_leads; ++l) {
          const double t = gev_quantile(rng.uniform(), component);
          const double td = t - (layout.depression_min + span * dew_rng.uniform());
          const std::size_t at = (l * members + m) * cells + cell;
          t2m[d][at] = static_cast<float>(t);
          dew[d][at] = static_cast<float>(td);
        }
      }
    }
  });

  SyntheticBlocks out;
  for (std::size_t d = 0; d < n_dates; ++d) {
    std::vector<TimeStep> times;
    for (int lead : layout.lead_hours)
      times.push_back({layout.init_dates[d], lead});
    out.t2m.emplace_back(spec.grid, kVarT2m, "degC", members, times,
                         std::move(t2m[d]));
    out.dewpoint.emplace_back(spec.grid, kVarDewpoint, "degC", members, times,
                              std::move(dew[d]));
  }
  return out;
}

}  // namespace tailcheck
