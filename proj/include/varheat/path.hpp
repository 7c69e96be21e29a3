#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace varheat {

enum class PathKind { fbm, perturbed, u0_exact, spde_numeric };

std::string to_string(PathKind k);
PathKind path_kind_from_string(const std::string& s);

// Time series on the grid t_i = i/N at a fixed spatial point; the universal
// observation object of the toolkit.
struct Path {
  std::vector<double> values;  // length grid_n + 1, values[0] at t = 0
  int grid_n = 0;
  double spatial_point = 0.0;
  PathKind meta = PathKind::fbm;
  // provenance carried to CSV headers
  double param = 0.0;  // hurst for fbm/perturbed, alpha for u0/spde
  double theta = 1.0;
  std::uint64_t seed = 0;
  std::string sigma_label = "none";

  double t(int i) const { return static_cast<double>(i) / grid_n; }

  void validate() const {
    if (grid_n < 1) throw std::invalid_argument("Path: grid_n must be >= 1");
    if (values.size() != static_cast<std::size_t>(grid_n) + 1)
      throw std::invalid_argument("Path: values length must equal grid_n + 1");
  }
};

}  // namespace varheat
