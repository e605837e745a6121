#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qwalk/model.hpp"

namespace qw {

/// A parsed model document. When the document names a preset, `preset` and
/// `params` are kept so sweeps can vary the preset's free parameters.
struct ModelConfig {
  ModelSpec spec;
  std::optional<std::string> preset;
  ParamMap params;
};

/// Parses the key-value model format documented in docs/formats.md.
/// Throws ParseError (with line number) on syntax errors and ValidationError
/// (with a dotted field path) when values break a coin invariant.
[[nodiscard]] ModelConfig load_model_config(std::string_view text);
[[nodiscard]] ModelSpec load_model(std::string_view text);
[[nodiscard]] ModelConfig load_model_file(const std::string& path);

/// Writes the explicit three-section form with 17 significant digits, so that
/// load_model(serialize(m)) == m.
[[nodiscard]] std::string serialize(const ModelSpec& m);

/// Locale-independent shortest round-trip formatting with 17 significant digits.
[[nodiscard]] std::string format_double(double v);

}  // namespace qw
