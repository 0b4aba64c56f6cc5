#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vega/space.hpp"

namespace vega {

/// A point in the unit-cube encoding: one coordinate block per param, in
/// space declaration order. Inactive conditioned params keep their drawn
/// coordinates so the encoded dimensionality is fixed per space.
struct EncodedSample {
  std::vector<std::pair<std::string, std::vector<double>>> coords;

  const std::vector<double>* find(const std::string& key) const;
  std::vector<double> flatten() const;
  json to_json() const;
  static EncodedSample from_json(const json& j);
  bool operator==(const EncodedSample&) const = default;
};

/// A decoded configuration: exactly the active keys, in declaration order.
struct ConfigSample {
  std::vector<std::pair<std::string, Value>> values;
  std::uint64_t seed = 0;
  std::string sampler;

  const Value* find(const std::string& key) const;
  bool contains(const std::string& key) const { return find(key) != nullptr; }
  Assignment as_assignment() const;

  /// Flat {key: value} object; provenance is carried separately.
  json to_json() const;
  static ConfigSample from_json(const json& j);

  /// Canonical form: keys sorted, shortest round-trip floats. Used as the
  /// lookup key for tabular benchmark files.
  std::string canonical() const;

  bool operator==(const ConfigSample& other) const { return values == other.values; }
};

/// Number of unit-cube coordinates a param consumes: 1 for scalars, length
/// for INT_ARRAY, times for MULTIPLY_POSITION_ARRAY, count*rows for
/// BINARY_ARRAY.
std::int64_t encoding_dim(const ParamSpec& spec);

/// Total encoded dimension of a space.
std::int64_t encoding_dim(const SearchSpace& space);

/// Decode one param from its unit-cube coordinates. Deterministic; throws
/// ValueError on dimension mismatch or out-of-range coordinates.
Value decode(const ParamSpec& spec, std::span<const double> u);

std::vector<std::int64_t> decode_int_array(const ParamSpec& spec, std::span<const double> u);
std::vector<std::int64_t> decode_multiply_position_array(const ParamSpec& spec,
                                                         std::span<const double> u);
BinaryMatrices decode_binary_array(const ParamSpec& spec, std::span<const double> u);

/// Encoding of category index i among k as its bucket midpoint (i+0.5)/k,
/// so decode(encode_of_category(...)) returns the category exactly.
double encode_of_category(std::int64_t index, std::int64_t k);

/// Draw a full sample: all coordinates i.i.d. uniform from the seeded
/// generator, decoded in DAG order; inactive conditioned keys are omitted
/// from the ConfigSample but retained in the EncodedSample.
std::pair<EncodedSample, ConfigSample> sample(const SearchSpace& space, std::uint64_t seed);

/// Decode a full encoded point (e.g. a model-based proposal) into a
/// ConfigSample under the same activity rules as sample().
ConfigSample decode_sample(const SearchSpace& space, const EncodedSample& encoded);

}  // namespace vega
