#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vega/value.hpp"

namespace vega {

enum class ParamType {
  Int,
  IntExp,
  IntCat,
  Float,
  FloatExp,
  FloatCat,
  String,
  IntArray,
  MultiplyPositionArray,
  BinaryArray,
};

const char* to_string(ParamType t);
std::optional<ParamType> param_type_from_string(const std::string& name);
bool is_array_type(ParamType t);
bool is_categorical_type(ParamType t);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

/// One typed hyperparameter declaration.
struct ParamSpec {
  std::string key;
  ParamType type = ParamType::Float;

  std::vector<Scalar> categories;        // *_CAT, STRING
  std::vector<Interval> intervals;       // INT/FLOAT[_EXP]: one; INT_ARRAY: one or per-position
  std::vector<std::int64_t> initial;     // MULTIPLY_POSITION_ARRAY initial values
  std::int64_t rows = 0, cols = 0;       // BINARY_ARRAY value shape

  std::optional<std::int64_t> length;
  std::optional<std::int64_t> times;
  std::optional<std::int64_t> n;
  std::optional<std::int64_t> count;

  bool operator==(const ParamSpec&) const = default;
};

enum class ConditionType { Equal, NotEqual, In, Forbidden };

const char* to_string(ConditionType t);
std::optional<ConditionType> condition_type_from_string(const std::string& name);

struct ConditionSpec {
  std::string key;     // condition name, e.g. "condition_for_sgd_momentum"
  std::string child;
  std::string parent;
  ConditionType type = ConditionType::Equal;
  std::vector<Scalar> values;
  std::optional<Interval> interval;  // IN/FORBIDDEN over a continuous parent

  bool operator==(const ConditionSpec&) const = default;

  /// Whether a parent value triggers this condition's range.
  bool matches(const Scalar& parent_value) const;
};

struct Diagnostic {
  std::string key;   // offending param/condition key
  std::string rule;  // short rule identifier
  std::string message;
};

class SpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The full conditional search space. Immutable after construction.
class SearchSpace {
 public:
  SearchSpace() = default;
  SearchSpace(std::vector<ParamSpec> params, std::vector<ConditionSpec> conditions);

  const std::vector<ParamSpec>& params() const { return params_; }
  const std::vector<ConditionSpec>& conditions() const { return conditions_; }

  const ParamSpec* find(const std::string& key) const;
  bool contains(const std::string& key) const { return find(key) != nullptr; }

  /// Condition whose child is `key`, or nullptr.
  const ConditionSpec* condition_on(const std::string& key) const;

  /// Children activated or disabled by `parent` in the condition DAG.
  std::vector<std::string> children_of(const std::string& parent) const;

  /// Param keys in a topological order of the condition DAG (parents
  /// first). Falls back to declaration order if the graph is cyclic.
  const std::vector<std::string>& topological_keys() const { return topo_; }

  bool operator==(const SearchSpace& other) const {
    return params_ == other.params_ && conditions_ == other.conditions_;
  }

 private:
  std::vector<ParamSpec> params_;
  std::vector<ConditionSpec> conditions_;
  std::map<std::string, size_t> index_;
  std::map<std::string, size_t> condition_index_;  // child key -> condition
  std::vector<std::string> topo_;
};

/// Parse a search-space block from config text. The document may either be
/// the block itself ({type, hyperparameters, condition(s)}) or wrap it under
/// a `search_space:` key. Throws ParseError / SpaceError.
SearchSpace parse_space(const std::string& document);

/// Build a SearchSpace from an already-parsed config node.
SearchSpace space_from_config(const json& node);

/// Emit a space as a config document; parse_space(serialize_space(s)) == s.
std::string serialize_space(const SearchSpace& space);
json space_to_config(const SearchSpace& space);

/// All invariant violations; empty iff the space is valid.
std::vector<Diagnostic> validate_space(const SearchSpace& space);

using Assignment = std::map<std::string, Value>;

/// Keys whose full chain of ancestor conditions is satisfied under the
/// assignment. Unconditioned params are always active; FORBIDDEN
/// deactivates the child when the parent's value is in range; inactive
/// parents deactivate descendants transitively. Throws SpaceError when a
/// condition's parent is active but missing from the assignment.
std::set<std::string> active_keys(const SearchSpace& space, const Assignment& assignment);

}  // namespace vega
