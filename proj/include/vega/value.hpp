#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace vega {

using json = nlohmann::ordered_json;

/// Scalar config value: int, float, string or bool.
using Scalar = std::variant<std::int64_t, double, std::string, bool>;

/// One binary one-hot matrix, rows x cols, entries 0/1.
using BinaryMatrix = std::vector<std::vector<int>>;

/// A list of binary matrices (one per supernet node).
using BinaryMatrices = std::vector<BinaryMatrix>;

/// A decoded hyperparameter value.
using Value = std::variant<std::int64_t, double, std::string, bool,
                           std::vector<std::int64_t>, BinaryMatrices>;

struct ValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json scalar_to_json(const Scalar& s);
Scalar scalar_from_json(const json& j);
std::string scalar_to_string(const Scalar& s);

json value_to_json(const Value& v);
Value value_from_json(const json& j);

/// Scalar equality with int/float cross-comparison (3 == 3.0).
bool scalar_equal(const Scalar& a, const Scalar& b);

/// Numeric view of a scalar; throws ValueError for strings.
double scalar_as_double(const Scalar& s);

}  // namespace vega
