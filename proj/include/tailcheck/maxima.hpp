#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tailcheck/grid.hpp"

namespace tailcheck {

/// Per-cell block maxima, one per ensemble member. Values are stored
/// cell-major: values[cell * n_members + member]. A cell whose inputs had any
/// missing value carries NaN for every member.
struct MemberMaxima {
  MemberMaxima() = default;
  MemberMaxima(Grid grid, std::size_t n_members, std::vector<double> values,
               std::string variable, std::string units);

  std::span<const double> cell(std::size_t i) const {
    return {values.data() + i * n_members, n_members};
  }
  bool cell_missing(std::size_t i) const;

  Grid grid;
  std::size_t n_members = 0;
  std::vector<double> values;
  std::string variable;
  std::string units;
};

}  // namespace tailcheck
