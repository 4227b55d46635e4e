#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nldelta/model.hpp"

// JSON problem files.
//   scattering: {"centers": [{"c": 0, "z": [re, im], "alpha": 2}], "k": 1,
//                "A": [re, im], "incidence": "left" | "right"}
//   bound:      {"centers": [{"c": 0, "omega": 2, "alpha": 1}]}
// "z" and "A" also accept a plain number. "alpha" defaults to 0, "A" to 1,
// "incidence" to left. "k" may be omitted when the caller supplies it.

namespace nldelta {

struct ScatterConfig {
  std::vector<DeltaCenter> centers;
  std::optional<double> k;
  Complex amplitude{1.0, 0.0};
  Incidence incidence = Incidence::Left;

  /// Validated problem at wavenumber k (or the configured one when k is empty).
  ScatteringProblem problem(std::optional<double> k_override = std::nullopt) const;
};

/// Throws ValidationError naming the field, or "json" with the parse
/// location for malformed text.
ScatterConfig parse_scatter_config(std::string_view text);
BoundProblem parse_bound_config(std::string_view text);

/// Whole file as text. Throws IoError naming the path.
std::string read_text_file(const std::string& path);

}  // namespace nldelta
