#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace stereocal {

/// The three ways this library produces a calibration.
enum class Method {
  essential,  ///< algebraic epipolar-residual estimate
  min2d,      ///< reprojection-cost refinement
  min3d,      ///< reconstruction-cost refinement
};

inline std::string method_name(Method m) {
  switch (m) {
    case Method::essential: return "essential";
    case Method::min2d: return "min2d";
    default: return "min3d";
  }
}

inline std::optional<Method> parse_method(std::string_view name) {
  if (name == "essential") return Method::essential;
  if (name == "min2d") return Method::min2d;
  if (name == "min3d") return Method::min3d;
  return std::nullopt;
}

}  // namespace stereocal
