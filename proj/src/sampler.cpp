#include "vega/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "vega/rng.hpp"

namespace vega {
namespace {

void check_unit(double u) {
  if (!(u >= 0.0 && u <= 1.0))
    throw ValueError("coordinate out of [0, 1]: " + std::to_string(u));
}

void check_dim(const ParamSpec& spec, std::span<const double> u) {
  const auto want = encoding_dim(spec);
  if (std::int64_t(u.size()) != want)
    throw ValueError("param '" + spec.key + "': expected " + std::to_string(want) +
                     " coordinates, got " + std::to_string(u.size()));
  for (const double x : u) check_unit(x);
}

std::int64_t category_index(double u, std::int64_t k) {
  return std::min(std::int64_t(u * double(k)), k - 1);
}

/// Uniform integer on [lo, hi], both inclusive, via equal-width buckets.
std::int64_t decode_int_uniform(double u, const Interval& iv) {
  const auto lo = std::int64_t(std::llround(iv.lo));
  const auto hi = std::int64_t(std::llround(iv.hi));
  return lo + category_index(u, hi - lo + 1);
}

double decode_float(double u, const Interval& iv) { return iv.lo + u * (iv.hi - iv.lo); }

double decode_float_exp(double u, const Interval& iv) {
  return std::exp(std::log(iv.lo) + u * (std::log(iv.hi) - std::log(iv.lo)));
}

std::int64_t round_clamped(double x, const Interval& iv) {
  const auto v = std::int64_t(std::llround(x));
  const auto lo = std::int64_t(std::llround(iv.lo));
  const auto hi = std::int64_t(std::llround(iv.hi));
  return std::clamp(v, lo, hi);
}

}  // namespace

const std::vector<double>* EncodedSample::find(const std::string& key) const {
  for (const auto& [k, v] : coords)
    if (k == key) return &v;
  return nullptr;
}

std::vector<double> EncodedSample::flatten() const {
  std::vector<double> out;
  for (const auto& [k, v] : coords) out.insert(out.end(), v.begin(), v.end());
  return out;
}

json EncodedSample::to_json() const {
  json obj = json::object();
  for (const auto& [k, v] : coords) obj[k] = v;
  return obj;
}

EncodedSample EncodedSample::from_json(const json& j) {
  EncodedSample out;
  for (const auto& [k, v] : j.items())
    out.coords.emplace_back(k, v.get<std::vector<double>>());
  return out;
}

const Value* ConfigSample::find(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return &v;
  return nullptr;
}

Assignment ConfigSample::as_assignment() const {
  Assignment out;
  for (const auto& [k, v] : values) out.emplace(k, v);
  return out;
}

json ConfigSample::to_json() const {
  json obj = json::object();
  for (const auto& [k, v] : values) obj[k] = value_to_json(v);
  return obj;
}

ConfigSample ConfigSample::from_json(const json& j) {
  ConfigSample out;
  for (const auto& [k, v] : j.items()) out.values.emplace_back(k, value_from_json(v));
  return out;
}

std::string ConfigSample::canonical() const {
  // nlohmann::json (non-ordered) sorts object keys; dump() renders floats
  // with shortest round-trip precision
  return nlohmann::json(to_json()).dump();
}

std::int64_t encoding_dim(const ParamSpec& spec) {
  switch (spec.type) {
    case ParamType::IntArray:
      return spec.length.value_or(std::int64_t(spec.intervals.size()));
    case ParamType::MultiplyPositionArray:
      return spec.times.value_or(0);
    case ParamType::BinaryArray:
      return spec.count.value_or(1) * spec.rows;
    default:
      return 1;
  }
}

std::int64_t encoding_dim(const SearchSpace& space) {
  std::int64_t total = 0;
  for (const ParamSpec& spec : space.params()) total += encoding_dim(spec);
  return total;
}

double encode_of_category(std::int64_t index, std::int64_t k) {
  return (double(index) + 0.5) / double(k);
}

std::vector<std::int64_t> decode_int_array(const ParamSpec& spec, std::span<const double> u) {
  check_dim(spec, u);
  std::vector<std::int64_t> out;
  out.reserve(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    const Interval& iv = spec.intervals.size() == 1 ? spec.intervals[0] : spec.intervals[i];
    out.push_back(decode_int_uniform(u[i], iv));
  }
  return out;
}

std::vector<std::int64_t> decode_multiply_position_array(const ParamSpec& spec,
                                                         std::span<const double> u) {
  check_dim(spec, u);
  const std::int64_t length = *spec.length;
  std::vector<std::int64_t> out(static_cast<size_t>(length));
  for (std::int64_t i = 0; i < length; ++i)
    out[size_t(i)] = i < std::int64_t(spec.initial.size()) ? spec.initial[size_t(i)]
                                                           : spec.initial.back();

  // `times` distinct positions: coordinate i picks from the remaining
  // (sorted) position list, which keeps the u -> positions map stable
  std::vector<std::int64_t> remaining(static_cast<size_t>(length));
  for (std::int64_t i = 0; i < length; ++i) remaining[size_t(i)] = i;
  for (const double coord : u) {
    const auto pick = size_t(category_index(coord, std::int64_t(remaining.size())));
    const std::int64_t pos = remaining[pick];
    remaining.erase(remaining.begin() + std::ptrdiff_t(pick));
    out[size_t(pos)] *= *spec.n;
  }
  return out;
}

BinaryMatrices decode_binary_array(const ParamSpec& spec, std::span<const double> u) {
  check_dim(spec, u);
  const std::int64_t count = spec.count.value_or(1);
  BinaryMatrices mats;
  mats.reserve(size_t(count));
  size_t at = 0;
  for (std::int64_t m = 0; m < count; ++m) {
    BinaryMatrix mat(size_t(spec.rows), std::vector<int>(size_t(spec.cols), 0));
    for (std::int64_t r = 0; r < spec.rows; ++r) {
      const auto col = size_t(category_index(u[at++], spec.cols));
      mat[size_t(r)][col] = 1;
    }
    mats.push_back(std::move(mat));
  }
  return mats;
}

Value decode(const ParamSpec& spec, std::span<const double> u) {
  switch (spec.type) {
    case ParamType::IntArray:
      return decode_int_array(spec, u);
    case ParamType::MultiplyPositionArray:
      return decode_multiply_position_array(spec, u);
    case ParamType::BinaryArray:
      return decode_binary_array(spec, u);
    default:
      break;
  }
  check_dim(spec, u);
  const double x = u[0];
  switch (spec.type) {
    case ParamType::Float:
      return decode_float(x, spec.intervals[0]);
    case ParamType::FloatExp:
      return decode_float_exp(x, spec.intervals[0]);
    case ParamType::Int:
      return decode_int_uniform(x, spec.intervals[0]);
    case ParamType::IntExp:
      return round_clamped(decode_float_exp(x, spec.intervals[0]), spec.intervals[0]);
    case ParamType::IntCat:
    case ParamType::FloatCat:
    case ParamType::String: {
      const Scalar& c = spec.categories[size_t(
          category_index(x, std::int64_t(spec.categories.size())))];
      return std::visit([](auto v) { return Value(std::move(v)); }, c);
    }
    default:
      throw ValueError("param '" + spec.key + "': unsupported type in decode");
  }
}

ConfigSample decode_sample(const SearchSpace& space, const EncodedSample& encoded) {
  Assignment all;
  std::vector<std::pair<std::string, Value>> decoded;
  for (const ParamSpec& spec : space.params()) {
    const std::vector<double>* u = encoded.find(spec.key);
    if (!u)
      throw ValueError("encoded sample lacks coordinates for '" + spec.key + "'");
    Value v = decode(spec, *u);
    all.emplace(spec.key, v);
    decoded.emplace_back(spec.key, std::move(v));
  }
  const std::set<std::string> active = active_keys(space, all);
  ConfigSample out;
  for (auto& [key, v] : decoded)
    if (active.count(key)) out.values.emplace_back(key, std::move(v));
  return out;
}

std::pair<EncodedSample, ConfigSample> sample(const SearchSpace& space, std::uint64_t seed) {
  Rng rng(seed);
  EncodedSample encoded;
  for (const ParamSpec& spec : space.params()) {
    std::vector<double> u(size_t(encoding_dim(spec)));
    for (double& x : u) x = rng.uniform();
    encoded.coords.emplace_back(spec.key, std::move(u));
  }
  ConfigSample decoded = decode_sample(space, encoded);
  decoded.seed = seed;
  decoded.sampler = "uniform";
  return {std::move(encoded), std::move(decoded)};
}

}  // namespace vega
