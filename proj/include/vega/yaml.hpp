#pragma once

#include <string>
#include <string_view>

#include "vega/value.hpp"

namespace vega {

/// Parse error with 1-based source position.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " at line " + std::to_string(line) +
                           ", column " + std::to_string(col)),
        line(line),
        col(col) {}
  int line;
  int col;
};

/// Parses the YAML-compatible config subset into an ordered JSON tree:
/// mappings, block and flow sequences, scalars (int, float, string, bool,
/// null), comments, two-space indentation. Tuple interval syntax `(a, b)`
/// is accepted anywhere a value may appear and normalized to a 2-element
/// array.
json parse_yaml(std::string_view text);

/// Emit a JSON tree in the same config subset (block style, 2-space
/// indent). parse_yaml(emit_yaml(x)) == x for trees made of the supported
/// scalar types.
std::string emit_yaml(const json& root);

}  // namespace vega
