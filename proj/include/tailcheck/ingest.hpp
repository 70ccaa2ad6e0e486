#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tailcheck/gev.hpp"
#include "tailcheck/grid.hpp"
#include "tailcheck/maxima.hpp"

namespace tailcheck {

struct TimeStep {
  std::string init_date;  // YYYY-MM-DD
  int lead_hours = 0;

  bool operator==(const TimeStep&) const = default;
};

/// Recognized variable labels.
inline constexpr const char* kVarT2m = "t2m";
inline constexpr const char* kVarDewpoint = "dewpoint";
inline constexpr const char* kVarHeatIndex = "heat_index";
bool is_known_variable(const std::string& name);

/// Ensemble forecast data for one variable: a Field per (time step, member),
/// stored in single precision as laid out on disk,
/// values[(t * n_members + m) * cells + cell].
class EnsembleBlock {
 public:
  EnsembleBlock() = default;
  EnsembleBlock(Grid grid, std::string variable, std::string units,
                std::size_t n_members, std::vector<TimeStep> times,
                std::vector<float> values);

  const Grid& grid() const { return grid_; }
  const std::string& variable() const { return variable_; }
  const std::string& units() const { return units_; }
  std::size_t n_members() const { return n_members_; }
  const std::vector<TimeStep>& times() const { return times_; }
  const std::vector<float>& values() const { return values_; }

  std::span<const float> layer(std::size_t t, std::size_t member) const;
  Field field(std::size_t t, std::size_t member) const;

  bool operator==(const EnsembleBlock& other) const;

 private:
  Grid grid_;
  std::string variable_;
  std::string units_;
  std::size_t n_members_ = 0;
  std::vector<TimeStep> times_;
  std::vector<float> values_;
};

// ---------------------------------------------------------------------------
// Container file format
//
//   bytes 0..7   magic "TCGRID01"
//   bytes 8..15  header length H, unsigned 64-bit little-endian
//   next H bytes UTF-8 JSON header, keys sorted, no whitespace
//   remainder    payload, IEEE-754 binary32 little-endian
//
// Header keys: format_version, kind, variable, units, nlat, nlon, latitudes,
// longitudes, n_members, times [{init, lead_hours}], layer_names,
// payload_count, and optionally layer_units (one per layer name).
// Payload order by kind:
//   ensemble  [time][member][cell]
//   maxima    [member][cell]
//   fields    [layer][cell]
//   draws     [layer][member][cell]   (member = posterior draw index)
// ---------------------------------------------------------------------------

enum class ContainerKind { kEnsemble, kMaxima, kFields, kDraws };

struct Container {
  ContainerKind kind = ContainerKind::kFields;
  Grid grid;
  std::string variable;
  std::string units;
  std::size_t n_members = 1;
  std::vector<TimeStep> times;
  std::vector<std::string> layer_names;
  std::vector<std::string> layer_units;  // optional, one per layer
  std::vector<float> payload;

  /// Payload length implied by the dimensions; throws kOverflow if the
  /// product does not fit.
  std::size_t expected_payload() const;
};

inline constexpr char kContainerMagic[8] = {'T', 'C', 'G', 'R',
                                            'I', 'D', '0', '1'};

std::vector<std::uint8_t> encode_container(const Container& c);
Container decode_container(std::span<const std::uint8_t> bytes);
void write_container(const Container& c, const std::filesystem::path& path);
Container read_container(const std::filesystem::path& path);

EnsembleBlock read_block(const std::filesystem::path& path);
void write_block(const EnsembleBlock& block, const std::filesystem::path& path);

MemberMaxima read_maxima(const std::filesystem::path& path);
void write_maxima(const MemberMaxima& maxima,
                  const std::filesystem::path& path);

/// A stack of named per-cell layers on one grid.
struct FieldSet {
  Grid grid;
  std::string variable;
  std::vector<std::string> names;
  std::vector<Field> fields;

  const Field& at(const std::string& name) const;
};
FieldSet read_fields(const std::filesystem::path& path);
void write_fields(const FieldSet& set, const std::filesystem::path& path);

LandMask read_land_mask(const std::filesystem::path& path);
void write_land_mask(const LandMask& mask, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic ensembles
// ---------------------------------------------------------------------------

/// True per-cell GEV parameters of the block maxima to generate.
struct SyntheticSpec {
  Grid grid;
  std::vector<GevParams> cell_params;
  std::size_t n_members = 0;
  std::uint64_t seed = 0;
  std::string variable = kVarT2m;

  void validate() const;
};

/// n_members independent draws per cell by inverse-CDF sampling of
/// Xoshiro256 uniforms; cell i uses the stream mix_seed(seed, i, kSynthStage).
MemberMaxima synth_member_maxima(const SyntheticSpec& spec, unsigned jobs = 1);

/// Stage id mixed into per-cell seeds by synth_member_maxima.
inline constexpr std::uint64_t kSynthStage = 1;
inline constexpr std::uint64_t kSynthLayerStage = 2;
inline constexpr std::uint64_t kSynthDewpointStage = 3;

/// Full forecast layers whose per-member maximum over all layers is exactly
/// GEV(cell_params) distributed. Each layer value is drawn from the GEV
/// whose K-fold maximum is the target (max-stability), K = init dates x
/// lead hours.
struct SyntheticBlocks {
  std::vector<EnsembleBlock> t2m;       // one block per init date
  std::vector<EnsembleBlock> dewpoint;  // matching dewpoint blocks
};
struct SyntheticLayout {
  std::vector<std::string> init_dates;
  std::vector<int> lead_hours;
  /// Dewpoint depression T - Td drawn uniformly from this range (degC).
  double depression_min = 2.0;
  double depression_max = 15.0;
};
SyntheticBlocks synth_blocks(const SyntheticSpec& spec,
                             const SyntheticLayout& layout,
                             unsigned jobs = 1);

/// Parameters of one layer when the maximum of `count` iid layers must
/// follow `target`.
GevParams max_stable_component(const GevParams& target, std::size_t count);

}  // namespace tailcheck
