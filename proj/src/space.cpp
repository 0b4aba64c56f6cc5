#include "vega/space.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#include "vega/yaml.hpp"

namespace vega {
namespace {

struct TypeName {
  const char* name;
  ParamType type;
};

// canonical names first; CamelCase forms (including the original
// "MutilyPositionArray" spelling) accepted for config compatibility
constexpr TypeName kTypeNames[] = {
    {"INT", ParamType::Int},
    {"INT_EXP", ParamType::IntExp},
    {"INT_CAT", ParamType::IntCat},
    {"FLOAT", ParamType::Float},
    {"FLOAT_EXP", ParamType::FloatExp},
    {"FLOAT_CAT", ParamType::FloatCat},
    {"STRING", ParamType::String},
    {"INT_ARRAY", ParamType::IntArray},
    {"IntArray", ParamType::IntArray},
    {"MULTIPLY_POSITION_ARRAY", ParamType::MultiplyPositionArray},
    {"MultiplyPositionArray", ParamType::MultiplyPositionArray},
    {"MutilyPositionArray", ParamType::MultiplyPositionArray},
    {"BINARY_ARRAY", ParamType::BinaryArray},
    {"BinaryArray", ParamType::BinaryArray},
};

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  bool fresh = true;  // at the start of a segment
  for (size_t i = 0; i < key.size(); ++i) {
    const char c = key[i];
    if (c == '.') {
      if (fresh) return false;  // empty segment
      fresh = true;
      continue;
    }
    const bool alpha = std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    const bool digit = std::isdigit(static_cast<unsigned char>(c));
    if (fresh && !alpha) return false;
    if (!fresh && !alpha && !digit) return false;
    fresh = false;
  }
  return !fresh;
}

double number_of(const json& j, const std::string& key) {
  if (!j.is_number())
    throw SpaceError("param '" + key + "': range element is not numeric: " + j.dump());
  return j.get<double>();
}

Interval interval_of(const json& arr, const std::string& key) {
  if (!arr.is_array() || arr.size() != 2)
    throw SpaceError("param '" + key + "': interval must have 2 elements");
  return {number_of(arr[0], key), number_of(arr[1], key)};
}

std::optional<std::int64_t> extra_of(const json& node, const char* name) {
  if (!node.contains(name) || node[name].is_null()) return std::nullopt;
  const json& v = node[name];
  if (!v.is_number_integer())
    throw SpaceError(std::string("extra '") + name + "' must be an integer");
  return v.get<std::int64_t>();
}

ParamSpec param_from_config(const json& node) {
  ParamSpec spec;
  if (!node.is_object() || !node.contains("key") || !node["key"].is_string())
    throw SpaceError("hyperparameter entry needs a string 'key'");
  spec.key = node["key"].get<std::string>();
  if (!node.contains("type") || !node["type"].is_string())
    throw SpaceError("param '" + spec.key + "': missing 'type'");
  const std::string tname = node["type"].get<std::string>();
  const auto type = param_type_from_string(tname);
  if (!type) throw SpaceError("param '" + spec.key + "': unknown type '" + tname + "'");
  spec.type = *type;

  spec.length = extra_of(node, "length");
  if (!spec.length) spec.length = extra_of(node, "lenth");  // paper listing spelling
  spec.times = extra_of(node, "times");
  spec.n = extra_of(node, "n");
  spec.count = extra_of(node, "count");

  const json range = node.contains("range") ? node["range"] : json(nullptr);
  switch (spec.type) {
    case ParamType::Int:
    case ParamType::IntExp:
    case ParamType::Float:
    case ParamType::FloatExp:
      spec.intervals.push_back(interval_of(range, spec.key));
      break;
    case ParamType::IntCat:
    case ParamType::FloatCat:
    case ParamType::String:
      if (!range.is_array())
        throw SpaceError("param '" + spec.key + "': categorical range must be a list");
      for (const json& v : range) spec.categories.push_back(scalar_from_json(v));
      break;
    case ParamType::IntArray: {
      if (!range.is_array() || range.empty())
        throw SpaceError("param '" + spec.key + "': INT_ARRAY range must be a list");
      if (range[0].is_array()) {
        for (const json& v : range) spec.intervals.push_back(interval_of(v, spec.key));
        if (!spec.length) spec.length = std::int64_t(spec.intervals.size());
      } else {
        spec.intervals.push_back(interval_of(range, spec.key));
      }
      break;
    }
    case ParamType::MultiplyPositionArray:
      if (!range.is_array() || range.empty())
        throw SpaceError("param '" + spec.key + "': range must list the initial values");
      for (const json& v : range) {
        if (!v.is_number_integer())
          throw SpaceError("param '" + spec.key + "': initial values must be integers");
        spec.initial.push_back(v.get<std::int64_t>());
      }
      break;
    case ParamType::BinaryArray: {
      const Interval shape = interval_of(range, spec.key);
      spec.rows = std::int64_t(shape.lo);
      spec.cols = std::int64_t(shape.hi);
      break;
    }
  }
  return spec;
}

ConditionSpec condition_from_config(const json& node, const SearchSpace& partial) {
  ConditionSpec cond;
  if (!node.is_object())
    throw SpaceError("condition entry must be a mapping");
  if (node.contains("key") && node["key"].is_string())
    cond.key = node["key"].get<std::string>();
  for (const char* field : {"child", "parent"}) {
    if (!node.contains(field) || !node[field].is_string())
      throw SpaceError("condition '" + cond.key + "': missing '" + field + "'");
  }
  cond.child = node["child"].get<std::string>();
  cond.parent = node["parent"].get<std::string>();
  if (!node.contains("type") || !node["type"].is_string())
    throw SpaceError("condition '" + cond.key + "': missing 'type'");
  const std::string tname = node["type"].get<std::string>();
  const auto type = condition_type_from_string(tname);
  if (!type)
    throw SpaceError("condition '" + cond.key + "': unknown type '" + tname + "'");
  cond.type = *type;

  const json range = node.contains("range") ? node["range"] : json(nullptr);
  if (!range.is_array() || range.empty())
    throw SpaceError("condition '" + cond.key + "': range must be a non-empty list");

  // for continuous parents, a 2-number IN/FORBIDDEN range on a float param
  // reads as an inclusive interval; everything else is a value list
  const ParamSpec* parent = partial.find(cond.parent);
  const bool continuous_parent =
      parent && (parent->type == ParamType::Float || parent->type == ParamType::FloatExp);
  const bool interval_shaped = range.size() == 2 && range[0].is_number() &&
                               range[1].is_number() &&
                               (cond.type == ConditionType::In ||
                                cond.type == ConditionType::Forbidden);
  if (continuous_parent && interval_shaped) {
    cond.interval = Interval{range[0].get<double>(), range[1].get<double>()};
  } else {
    for (const json& v : range) cond.values.push_back(scalar_from_json(v));
  }
  return cond;
}

/// Fill a BINARY_ARRAY's count from a companion "<prefix>.count" param with
/// a single-value range, the paper's supernet-weight pattern.
void resolve_binary_counts(std::vector<ParamSpec>& params) {
  for (ParamSpec& spec : params) {
    if (spec.type != ParamType::BinaryArray || spec.count) continue;
    const size_t dot = spec.key.rfind('.');
    const std::string prefix = dot == std::string::npos ? "" : spec.key.substr(0, dot + 1);
    const std::string companion = prefix + "count";
    for (const ParamSpec& other : params) {
      if (other.key != companion || other.categories.size() != 1) continue;
      if (const auto* i = std::get_if<std::int64_t>(&other.categories[0]))
        spec.count = *i;
    }
  }
}

json range_to_config(const ParamSpec& spec) {
  json range = json::array();
  auto num = [&](double v, bool as_int) {
    return as_int ? json(std::int64_t(v)) : json(v);
  };
  const bool ints = spec.type == ParamType::Int || spec.type == ParamType::IntExp ||
                    spec.type == ParamType::IntArray;
  switch (spec.type) {
    case ParamType::Int:
    case ParamType::IntExp:
    case ParamType::Float:
    case ParamType::FloatExp:
      range.push_back(num(spec.intervals[0].lo, ints));
      range.push_back(num(spec.intervals[0].hi, ints));
      break;
    case ParamType::IntCat:
    case ParamType::FloatCat:
    case ParamType::String:
      for (const Scalar& c : spec.categories) range.push_back(scalar_to_json(c));
      break;
    case ParamType::IntArray:
      if (spec.intervals.size() == 1 && spec.length &&
          *spec.length != std::int64_t(spec.intervals.size())) {
        range.push_back(num(spec.intervals[0].lo, true));
        range.push_back(num(spec.intervals[0].hi, true));
      } else {
        for (const Interval& iv : spec.intervals)
          range.push_back(json::array({std::int64_t(iv.lo), std::int64_t(iv.hi)}));
      }
      break;
    case ParamType::MultiplyPositionArray:
      for (const std::int64_t v : spec.initial) range.push_back(v);
      break;
    case ParamType::BinaryArray:
      range.push_back(spec.rows);
      range.push_back(spec.cols);
      break;
  }
  return range;
}

}  // namespace

const char* to_string(ParamType t) {
  switch (t) {
    case ParamType::Int: return "INT";
    case ParamType::IntExp: return "INT_EXP";
    case ParamType::IntCat: return "INT_CAT";
    case ParamType::Float: return "FLOAT";
    case ParamType::FloatExp: return "FLOAT_EXP";
    case ParamType::FloatCat: return "FLOAT_CAT";
    case ParamType::String: return "STRING";
    case ParamType::IntArray: return "INT_ARRAY";
    case ParamType::MultiplyPositionArray: return "MULTIPLY_POSITION_ARRAY";
    case ParamType::BinaryArray: return "BINARY_ARRAY";
  }
  return "?";
}

std::optional<ParamType> param_type_from_string(const std::string& name) {
  for (const TypeName& tn : kTypeNames)
    if (name == tn.name) return tn.type;
  return std::nullopt;
}

bool is_array_type(ParamType t) {
  return t == ParamType::IntArray || t == ParamType::MultiplyPositionArray ||
         t == ParamType::BinaryArray;
}

bool is_categorical_type(ParamType t) {
  return t == ParamType::IntCat || t == ParamType::FloatCat || t == ParamType::String;
}

const char* to_string(ConditionType t) {
  switch (t) {
    case ConditionType::Equal: return "EQUAL";
    case ConditionType::NotEqual: return "NOT_EQUAL";
    case ConditionType::In: return "IN";
    case ConditionType::Forbidden: return "FORBIDDEN";
  }
  return "?";
}

std::optional<ConditionType> condition_type_from_string(const std::string& name) {
  if (name == "EQUAL") return ConditionType::Equal;
  if (name == "NOT_EQUAL") return ConditionType::NotEqual;
  if (name == "IN") return ConditionType::In;
  if (name == "FORBIDDEN") return ConditionType::Forbidden;
  return std::nullopt;
}

bool ConditionSpec::matches(const Scalar& parent_value) const {
  for (const Scalar& v : values)
    if (scalar_equal(v, parent_value)) return true;
  if (interval) {
    const double x = scalar_as_double(parent_value);
    if (x >= interval->lo && x <= interval->hi) return true;
  }
  return false;
}

SearchSpace::SearchSpace(std::vector<ParamSpec> params, std::vector<ConditionSpec> conditions)
    : params_(std::move(params)), conditions_(std::move(conditions)) {
  for (size_t i = 0; i < params_.size(); ++i) index_.emplace(params_[i].key, i);
  for (size_t i = 0; i < conditions_.size(); ++i)
    condition_index_.emplace(conditions_[i].child, i);

  // Kahn's algorithm over parent -> child edges
  std::map<std::string, int> indeg;
  std::map<std::string, std::vector<std::string>> out;
  for (const ParamSpec& p : params_) indeg[p.key] = 0;
  for (const ConditionSpec& c : conditions_) {
    if (indeg.count(c.parent) && indeg.count(c.child)) {
      out[c.parent].push_back(c.child);
      ++indeg[c.child];
    }
  }
  std::deque<std::string> ready;
  for (const ParamSpec& p : params_)
    if (indeg[p.key] == 0) ready.push_back(p.key);
  while (!ready.empty()) {
    std::string k = ready.front();
    ready.pop_front();
    topo_.push_back(k);
    for (const std::string& child : out[k])
      if (--indeg[child] == 0) ready.push_back(child);
  }
  if (topo_.size() != params_.size()) {  // cycle; validate_space reports it
    topo_.clear();
    for (const ParamSpec& p : params_) topo_.push_back(p.key);
  }
}

const ParamSpec* SearchSpace::find(const std::string& key) const {
  const auto it = index_.find(key);
  return it == index_.end() ? nullptr : &params_[it->second];
}

const ConditionSpec* SearchSpace::condition_on(const std::string& key) const {
  const auto it = condition_index_.find(key);
  return it == condition_index_.end() ? nullptr : &conditions_[it->second];
}

std::vector<std::string> SearchSpace::children_of(const std::string& parent) const {
  std::vector<std::string> out;
  for (const ConditionSpec& c : conditions_)
    if (c.parent == parent) out.push_back(c.child);
  return out;
}

SearchSpace space_from_config(const json& node) {
  if (!node.is_object()) throw SpaceError("search space block must be a mapping");

  std::vector<ParamSpec> params;
  if (node.contains("hyperparameters") && !node["hyperparameters"].is_null()) {
    const json& hp = node["hyperparameters"];
    if (!hp.is_array()) throw SpaceError("'hyperparameters' must be a list");
    for (const json& entry : hp) params.push_back(param_from_config(entry));
  }
  resolve_binary_counts(params);
  SearchSpace partial(params, {});

  std::vector<ConditionSpec> conditions;
  const char* cond_key = node.contains("conditions") ? "conditions" : "condition";
  if (node.contains(cond_key) && !node[cond_key].is_null()) {
    const json& cs = node[cond_key];
    if (cs.is_array()) {
      for (const json& entry : cs) conditions.push_back(condition_from_config(entry, partial));
    } else if (cs.is_object()) {
      conditions.push_back(condition_from_config(cs, partial));
    } else {
      throw SpaceError("'" + std::string(cond_key) + "' must be a list or mapping");
    }
  }

  SearchSpace space(std::move(params), std::move(conditions));
  const auto diags = validate_space(space);
  if (!diags.empty()) {
    std::string msg = "invalid search space:";
    for (const Diagnostic& d : diags) msg += "\n  [" + d.rule + "] " + d.message;
    throw SpaceError(msg);
  }
  return space;
}

SearchSpace parse_space(const std::string& document) {
  json root = parse_yaml(document);
  if (root.is_object() && root.contains("search_space")) root = root["search_space"];
  return space_from_config(root);
}

json space_to_config(const SearchSpace& space) {
  json node = json::object();
  node["type"] = "SearchSpace";
  json hp = json::array();
  for (const ParamSpec& spec : space.params()) {
    json entry = json::object();
    entry["key"] = spec.key;
    entry["type"] = to_string(spec.type);
    entry["range"] = range_to_config(spec);
    if (spec.type == ParamType::IntArray) {
      if (spec.length && spec.intervals.size() == 1 &&
          *spec.length != std::int64_t(spec.intervals.size()))
        entry["length"] = *spec.length;
    } else if (spec.length) {
      entry["length"] = *spec.length;
    }
    if (spec.times) entry["times"] = *spec.times;
    if (spec.n) entry["n"] = *spec.n;
    if (spec.count) entry["count"] = *spec.count;
    hp.push_back(std::move(entry));
  }
  node["hyperparameters"] = std::move(hp);
  if (!space.conditions().empty()) {
    json cs = json::array();
    for (const ConditionSpec& cond : space.conditions()) {
      json entry = json::object();
      if (!cond.key.empty()) entry["key"] = cond.key;
      entry["child"] = cond.child;
      entry["parent"] = cond.parent;
      entry["type"] = to_string(cond.type);
      json range = json::array();
      if (cond.interval) {
        range.push_back(cond.interval->lo);
        range.push_back(cond.interval->hi);
      } else {
        for (const Scalar& v : cond.values) range.push_back(scalar_to_json(v));
      }
      entry["range"] = std::move(range);
      cs.push_back(std::move(entry));
    }
    node["conditions"] = std::move(cs);
  }
  return node;
}

std::string serialize_space(const SearchSpace& space) {
  json doc = json::object();
  doc["search_space"] = space_to_config(space);
  return emit_yaml(doc);
}

std::vector<Diagnostic> validate_space(const SearchSpace& space) {
  std::vector<Diagnostic> diags;
  auto report = [&](const std::string& key, const std::string& rule, const std::string& msg) {
    diags.push_back({key, rule, msg});
  };

  std::set<std::string> seen;
  for (const ParamSpec& spec : space.params()) {
    if (!valid_key(spec.key))
      report(spec.key, "key-format", "key '" + spec.key + "' is not a dotted identifier path");
    if (!seen.insert(spec.key).second)
      report(spec.key, "duplicate-key", "duplicate key '" + spec.key + "'");

    const bool exp = spec.type == ParamType::IntExp || spec.type == ParamType::FloatExp;
    for (const Interval& iv : spec.intervals) {
      if (iv.lo > iv.hi)
        report(spec.key, "interval-order", "interval lo > hi on '" + spec.key + "'");
      if (exp && iv.lo <= 0.0)
        report(spec.key, "exp-positive", "EXP range requires lo > 0 on '" + spec.key + "'");
    }
    if (is_categorical_type(spec.type)) {
      if (spec.categories.empty())
        report(spec.key, "empty-categories", "categorical range is empty on '" + spec.key + "'");
      for (size_t i = 0; i < spec.categories.size(); ++i)
        for (size_t j = i + 1; j < spec.categories.size(); ++j)
          if (scalar_equal(spec.categories[i], spec.categories[j])) {
            report(spec.key, "duplicate-category",
                   "duplicate category " + scalar_to_string(spec.categories[i]) + " on '" +
                       spec.key + "'");
            j = spec.categories.size();
            i = spec.categories.size();
          }
    }

    if (!is_array_type(spec.type)) {
      if (spec.length || spec.times || spec.n || spec.count)
        report(spec.key, "scalar-extras",
               "array extras on non-array param '" + spec.key + "'");
      continue;
    }
    switch (spec.type) {
      case ParamType::IntArray:
        if (!spec.length || *spec.length < 1)
          report(spec.key, "length", "INT_ARRAY needs length >= 1 on '" + spec.key + "'");
        else if (spec.intervals.size() > 1 &&
                 *spec.length != std::int64_t(spec.intervals.size()))
          report(spec.key, "length-mismatch",
                 "per-position range size != length on '" + spec.key + "'");
        break;
      case ParamType::MultiplyPositionArray: {
        if (!spec.length || *spec.length < 1)
          report(spec.key, "length", "needs length >= 1 on '" + spec.key + "'");
        if (!spec.times)
          report(spec.key, "times", "needs times on '" + spec.key + "'");
        else if (*spec.times < 1 || (spec.length && *spec.times > *spec.length))
          report(spec.key, "times-range",
                 "times must satisfy 1 <= times <= length on '" + spec.key + "'");
        if (!spec.n) report(spec.key, "n", "needs multiplier n on '" + spec.key + "'");
        if (spec.initial.empty())
          report(spec.key, "initial", "needs initial values on '" + spec.key + "'");
        break;
      }
      case ParamType::BinaryArray:
        if (spec.rows < 1 || spec.cols < 1)
          report(spec.key, "shape", "BINARY_ARRAY needs range [rows, cols] >= 1 on '" +
                                        spec.key + "'");
        if (spec.count && *spec.count < 1)
          report(spec.key, "count", "count must be >= 1 on '" + spec.key + "'");
        break;
      default:
        break;
    }
  }

  std::set<std::string> children;
  for (const ConditionSpec& cond : space.conditions()) {
    const std::string label = cond.key.empty() ? cond.child : cond.key;
    if (cond.child == cond.parent)
      report(label, "self-condition", "condition child equals parent '" + cond.child + "'");
    if (!space.contains(cond.parent))
      report(label, "dangling-parent", "dangling parent reference '" + cond.parent + "'");
    if (!space.contains(cond.child))
      report(label, "dangling-child", "dangling child reference '" + cond.child + "'");
    if (!children.insert(cond.child).second)
      report(label, "multi-condition",
             "param '" + cond.child + "' is the child of more than one condition");
    if (cond.values.empty() && !cond.interval)
      report(label, "empty-range", "condition range is empty");

    if (const ParamSpec* parent = space.find(cond.parent)) {
      const bool parent_is_string = parent->type == ParamType::String;
      for (const Scalar& v : cond.values) {
        const bool v_is_string = std::holds_alternative<std::string>(v);
        if (v_is_string != parent_is_string)
          report(label, "range-type",
                 "condition value " + scalar_to_string(v) +
                     " is not type-compatible with parent '" + cond.parent + "'");
      }
    }
  }

  // cycle check: the constructor falls back to declaration order when
  // Kahn's sort fails, so re-run the count here
  {
    std::map<std::string, int> indeg;
    std::map<std::string, std::vector<std::string>> out;
    for (const ParamSpec& p : space.params()) indeg[p.key] = 0;
    size_t edges = 0;
    for (const ConditionSpec& c : space.conditions()) {
      if (indeg.count(c.parent) && indeg.count(c.child)) {
        out[c.parent].push_back(c.child);
        ++indeg[c.child];
        ++edges;
      }
    }
    (void)edges;
    std::deque<std::string> ready;
    size_t visited = 0;
    for (const auto& [k, d] : indeg)
      if (d == 0) ready.push_back(k);
    while (!ready.empty()) {
      const std::string k = ready.front();
      ready.pop_front();
      ++visited;
      for (const std::string& child : out[k])
        if (--indeg[child] == 0) ready.push_back(child);
    }
    if (visited != space.params().size())
      report("", "condition-cycle", "condition graph contains a cycle");
  }
  return diags;
}

std::set<std::string> active_keys(const SearchSpace& space, const Assignment& assignment) {
  std::set<std::string> active;
  for (const std::string& key : space.topological_keys()) {
    const ConditionSpec* cond = space.condition_on(key);
    if (!cond) {
      active.insert(key);
      continue;
    }
    if (!active.count(cond->parent)) continue;  // inactive parent: stay inactive
    const auto it = assignment.find(cond->parent);
    if (it == assignment.end())
      throw SpaceError("active_keys: no value assigned for required param '" +
                       cond->parent + "'");
    const Value& v = it->second;
    Scalar parent_value;
    if (const auto* i = std::get_if<std::int64_t>(&v)) parent_value = *i;
    else if (const auto* d = std::get_if<double>(&v)) parent_value = *d;
    else if (const auto* s = std::get_if<std::string>(&v)) parent_value = *s;
    else if (const auto* b = std::get_if<bool>(&v)) parent_value = *b;
    else
      throw SpaceError("active_keys: condition parent '" + cond->parent +
                       "' has a non-scalar value");
    const bool in_range = cond->matches(parent_value);
    const bool is_active = (cond->type == ConditionType::NotEqual ||
                            cond->type == ConditionType::Forbidden)
                               ? !in_range
                               : in_range;
    if (is_active) active.insert(key);
  }
  return active;
}

}  // namespace vega
