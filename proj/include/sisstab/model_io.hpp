#pragma once

#include <string>

#include "sisstab/model.hpp"

namespace sisstab {

/// Reads a model description:
///
///   [system]
///   n0 = 2
///
///   [[direction]]
///   kind = "infinite"      # or "periodic" / "finite" (needs period)
///   n_pos = 1
///   n_neg = 1
///
///   [matrices]
///   A_TT = [["-0.5", "0"], ["0", "-1"]]
///   ...
///
/// Matrix entries are decimal or p/q strings (bare numbers are accepted and
/// read from their text, so they stay exact). Throws ParseError on syntax or
/// content errors and ShapeError on inconsistent block sizes.
SisModel parse_model_text(const std::string& text);
SisModel parse_model_file(const std::string& path);

/// Canonical TOML rendering; parse_model_text(model_to_toml(m)) == m.
std::string model_to_toml(const SisModel& m);

/// FNV-1a (64-bit, hex) of the canonical rendering.
std::string model_hash(const SisModel& m);

}  // namespace sisstab
