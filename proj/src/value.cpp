#include "vega/value.hpp"

namespace vega {

json scalar_to_json(const Scalar& s) {
  return std::visit([](const auto& v) { return json(v); }, s);
}

Scalar scalar_from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ValueError("not a scalar: " + j.dump());
}

std::string scalar_to_string(const Scalar& s) {
  return scalar_to_json(s).dump();
}

json value_to_json(const Value& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

Value value_from_json(const json& j) {
  if (j.is_array()) {
    if (!j.empty() && j[0].is_array()) return j.get<BinaryMatrices>();
    return j.get<std::vector<std::int64_t>>();
  }
  Scalar s = scalar_from_json(j);
  return std::visit([](auto v) { return Value(std::move(v)); }, s);
}

bool scalar_equal(const Scalar& a, const Scalar& b) {
  if (a.index() == b.index()) return a == b;
  const bool a_num = std::holds_alternative<std::int64_t>(a) ||
                     std::holds_alternative<double>(a);
  const bool b_num = std::holds_alternative<std::int64_t>(b) ||
                     std::holds_alternative<double>(b);
  if (a_num && b_num) return scalar_as_double(a) == scalar_as_double(b);
  return false;
}

double scalar_as_double(const Scalar& s) {
  if (const auto* i = std::get_if<std::int64_t>(&s)) return double(*i);
  if (const auto* d = std::get_if<double>(&s)) return *d;
  if (const auto* b = std::get_if<bool>(&s)) return *b ? 1.0 : 0.0;
  throw ValueError("scalar is not numeric: " + scalar_to_string(s));
}

}  // namespace vega
