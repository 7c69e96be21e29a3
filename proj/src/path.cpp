#include "varheat/path.hpp"

#include "varheat/sigma.hpp"

namespace varheat {

std::string to_string(PathKind k) {
  switch (k) {
    case PathKind::fbm: return "fbm";
    case PathKind::perturbed: return "perturbed";
    case PathKind::u0_exact: return "u0-exact";
    case PathKind::spde_numeric: return "spde-numeric";
  }
  return "fbm";
}

PathKind path_kind_from_string(const std::string& s) {
  if (s == "fbm") return PathKind::fbm;
  if (s == "perturbed") return PathKind::perturbed;
  if (s == "u0-exact") return PathKind::u0_exact;
  if (s == "spde-numeric") return PathKind::spde_numeric;
  throw std::invalid_argument("unknown path kind: " + s);
}

SigmaSpec SigmaSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::vector<double> vals;
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos < rest.size()) {
      std::size_t used = 0;
      vals.push_back(std::stod(rest.substr(pos), &used));
      pos += used;
      if (pos < rest.size() && rest[pos] == ',') ++pos;
    }
  }
  if (kind == "constant") {
    if (vals.size() != 1) throw std::invalid_argument("sigma constant wants 1 parameter");
    return constant(vals[0]);
  }
  if (kind == "affine") {
    if (vals.size() != 2) throw std::invalid_argument("sigma affine wants 2 parameters");
    return affine(vals[0], vals[1]);
  }
  if (kind == "sinusoidal") {
    if (vals.size() != 3) throw std::invalid_argument("sigma sinusoidal wants 3 parameters");
    return sinusoidal(vals[0], vals[1], vals[2]);
  }
  if (kind == "none") return constant(1.0);
  throw std::invalid_argument("unknown sigma kind: " + kind);
}

}  // namespace varheat
