#include "vega/search.hpp"

#include <algorithm>
#include <cmath>

#include "vega/rng.hpp"

namespace vega {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Score ordering key: better first, ties toward the earlier trial_id.
bool better(const std::pair<std::int64_t, double>& a,
            const std::pair<std::int64_t, double>& b, bool maximize) {
  if (a.second != b.second) return maximize ? a.second > b.second : a.second < b.second;
  return a.first < b.first;
}

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

double gaussian(double x, double mu, double bw) {
  const double z = (x - mu) / bw;
  return std::exp(-0.5 * z * z) / (bw * 2.5066282746310002);
}

EncodedSample encoded_from_flat(const SearchSpace& space, const std::vector<double>& flat) {
  EncodedSample out;
  size_t at = 0;
  for (const ParamSpec& spec : space.params()) {
    const auto dim = size_t(encoding_dim(spec));
    out.coords.emplace_back(spec.key,
                            std::vector<double>(flat.begin() + std::ptrdiff_t(at),
                                                flat.begin() + std::ptrdiff_t(at + dim)));
    at += dim;
  }
  return out;
}

Trial trial_from_encoded(const SearchSpace& space, EncodedSample encoded,
                         std::int64_t trial_id, std::int64_t resource, int rung,
                         int bracket, std::uint64_t seed, const std::string& sampler) {
  Trial t;
  t.trial_id = trial_id;
  t.sample = decode_sample(space, encoded);
  t.sample.seed = seed;
  t.sample.sampler = sampler;
  t.encoded = std::move(encoded);
  t.resource = resource;
  t.rung = rung;
  t.bracket = bracket;
  return t;
}

}  // namespace

const char* to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::Ok: return "ok";
    case TrialStatus::Failed: return "failed";
    case TrialStatus::Timeout: return "timeout";
  }
  return "?";
}

std::optional<TrialStatus> trial_status_from_string(const std::string& name) {
  if (name == "ok") return TrialStatus::Ok;
  if (name == "failed") return TrialStatus::Failed;
  if (name == "timeout") return TrialStatus::Timeout;
  return std::nullopt;
}

json TrialResult::to_json() const {
  json j = json::object();
  j["trial_id"] = trial_id;
  j["attempt"] = attempt;
  j["status"] = to_string(status);
  json m = json::object();
  for (const auto& [k, v] : metrics) m[k] = v;
  j["metrics"] = std::move(m);
  if (!objectives.empty()) j["objectives"] = objectives;
  j["wall_time"] = wall_time;
  return j;
}

TrialResult TrialResult::from_json(const json& j) {
  TrialResult r;
  r.trial_id = j.at("trial_id").get<std::int64_t>();
  r.attempt = j.value("attempt", 0);
  const auto status = trial_status_from_string(j.value("status", "ok"));
  if (!status) throw SearchError("unknown trial status '" + j.value("status", "") + "'");
  r.status = *status;
  if (j.contains("metrics"))
    for (const auto& [k, v] : j.at("metrics").items()) r.metrics[k] = v.get<double>();
  if (j.contains("objectives")) r.objectives = j.at("objectives").get<std::vector<double>>();
  r.wall_time = j.value("wall_time", 0.0);
  return r;
}

std::vector<Trial> propose_random(const SearchSpace& space, std::uint64_t rng_seed,
                                  std::int64_t n, std::int64_t r0, std::int64_t start_id) {
  std::vector<Trial> out;
  out.reserve(size_t(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t sub = derive_seed(rng_seed, std::uint64_t(i));
    auto [encoded, sample] = vega::sample(space, sub);
    Trial t;
    t.trial_id = start_id + i;
    t.sample = std::move(sample);
    t.encoded = std::move(encoded);
    t.resource = r0;
    t.rung = 0;
    out.push_back(std::move(t));
  }
  return out;
}

AshaState::AshaState(int eta, std::int64_t r0, int max_rungs, bool maximize)
    : eta(eta), r0(r0), max_rungs(max_rungs), maximize(maximize) {
  rungs.resize(size_t(max_rungs));
  promoted.resize(size_t(max_rungs));
}

std::int64_t AshaState::resource_at(int rung) const { return r0 * ipow(eta, rung); }

std::vector<std::int64_t> AshaState::top_slice(int rung) const {
  const auto& entries = rungs[size_t(rung)];
  const size_t k = entries.size() / size_t(eta);
  std::vector<std::pair<std::int64_t, double>> sorted = entries;
  std::sort(sorted.begin(), sorted.end(),
            [&](const auto& a, const auto& b) { return better(a, b, maximize); });
  std::vector<std::int64_t> out;
  for (size_t i = 0; i < k && i < sorted.size(); ++i) out.push_back(sorted[i].first);
  return out;
}

void asha_register(AshaState& state, std::int64_t trial_id, int rung) {
  if (rung < 0 || rung >= state.max_rungs)
    throw SearchError("asha_register: rung " + std::to_string(rung) + " out of range");
  state.trial_rung[trial_id] = rung;
}

AshaDecision asha_on_result(AshaState& state, const TrialResult& result) {
  const auto it = state.trial_rung.find(result.trial_id);
  if (it == state.trial_rung.end())
    throw SearchError("asha_on_result: unknown trial " + std::to_string(result.trial_id));
  const int rung = it->second;

  double score;
  if (result.status != TrialStatus::Ok) {
    score = state.maximize ? -kInf : kInf;
  } else {
    const auto metric = result.metrics.find(state.primary_metric);
    if (metric == result.metrics.end())
      throw SearchError("asha_on_result: result lacks primary metric '" +
                        state.primary_metric + "'");
    score = metric->second;
  }
  auto& entries = state.rungs[size_t(rung)];
  entries.emplace_back(result.trial_id, score);

  if (rung == state.max_rungs - 1)
    return {AshaDecision::Kind::Finalize, result.trial_id, rung, state.resource_at(rung)};
  if (result.status != TrialStatus::Ok) return {AshaDecision::Kind::SampleNew, 0, 0, 0};

  auto& done = state.promoted[size_t(rung)];
  const size_t k = entries.size() / size_t(state.eta);
  if (done.size() < k && !done.count(result.trial_id)) {
    const std::vector<std::int64_t> top = state.top_slice(rung);
    if (std::find(top.begin(), top.end(), result.trial_id) != top.end()) {
      done.insert(result.trial_id);
      return {AshaDecision::Kind::Promote, result.trial_id, rung + 1,
              state.resource_at(rung + 1)};
    }
  }
  return {AshaDecision::Kind::SampleNew, 0, 0, 0};
}

std::optional<AshaDecision> asha_next_promotion(AshaState& state) {
  for (int rung = state.max_rungs - 2; rung >= 0; --rung) {
    auto& done = state.promoted[size_t(rung)];
    const size_t k = state.rungs[size_t(rung)].size() / size_t(state.eta);
    if (done.size() >= k) continue;
    for (const std::int64_t id : state.top_slice(rung)) {
      if (done.count(id)) continue;
      done.insert(id);
      return AshaDecision{AshaDecision::Kind::Promote, id, rung + 1,
                          state.resource_at(rung + 1)};
    }
  }
  return std::nullopt;
}

std::optional<std::pair<std::int64_t, double>> asha_best(const AshaState& state) {
  for (int rung = state.max_rungs - 1; rung >= 0; --rung) {
    std::optional<std::pair<std::int64_t, double>> best;
    for (const auto& entry : state.rungs[size_t(rung)]) {
      if (std::isinf(entry.second)) continue;
      if (!best || better(entry, *best, state.maximize)) best = entry;
    }
    if (best) return best;
  }
  return std::nullopt;
}

HyperbandBrackets::HyperbandBrackets(int eta, std::int64_t r_min, std::int64_t r_max)
    : eta_(eta), r_min_(r_min) {
  std::int64_t r = r_min;
  while (r * eta <= r_max) {
    r *= eta;
    ++s_max_;
  }
  current_ = s_max_;
}

std::int64_t HyperbandBrackets::resource_at(int rung) const {
  return r_min_ * ipow(eta_, rung);
}

std::int64_t HyperbandBrackets::quota(int bracket) const {
  const std::int64_t num = s_max_ + 1;
  return ((num + bracket) / (bracket + 1)) * ipow(eta_, bracket);
}

HyperbandBrackets::Slot HyperbandBrackets::next_slot() {
  if (issued_ >= quota(current_)) {
    issued_ = 0;
    current_ = current_ == 0 ? s_max_ : current_ - 1;
  }
  ++issued_;
  const int rung = s_max_ - current_;
  return {current_, rung, resource_at(rung)};
}

Trial bohb_propose(const std::vector<BohbObservation>& history, const SearchSpace& space,
                   HyperbandBrackets& brackets, std::uint64_t rng_seed,
                   const BohbParams& params, std::int64_t trial_id) {
  const HyperbandBrackets::Slot slot = brackets.next_slot();
  const auto dim = size_t(encoding_dim(space));
  Rng rng(rng_seed);

  // model fidelity: the highest resource level with at least D+1 points
  std::map<std::int64_t, std::vector<const BohbObservation*>> by_resource;
  for (const BohbObservation& obs : history) by_resource[obs.resource].push_back(&obs);
  const std::vector<const BohbObservation*>* model_set = nullptr;
  for (auto it = by_resource.rbegin(); it != by_resource.rend(); ++it) {
    if (it->second.size() >= dim + 1) {
      model_set = &it->second;
      break;
    }
  }

  if (!model_set || dim == 0) {
    const std::uint64_t sub = rng.next_u64();
    auto [encoded, sample] = vega::sample(space, sub);
    Trial t = trial_from_encoded(space, std::move(encoded), trial_id, slot.resource,
                                 slot.rung, slot.bracket, sub, "bohb-random");
    t.sample = std::move(sample);
    t.sample.sampler = "bohb-random";
    t.sample.seed = sub;
    return t;
  }

  // rank and split: |good| = min(max(ceil(gamma*N), D+1), N-1)
  std::vector<std::pair<std::int64_t, double>> order;  // (index, score)
  for (size_t i = 0; i < model_set->size(); ++i)
    order.emplace_back(std::int64_t(i), (*model_set)[i]->score);
  std::sort(order.begin(), order.end(),
            [&](const auto& a, const auto& b) { return better(a, b, params.maximize); });
  const size_t n = order.size();
  const size_t n_good = std::min(
      std::max(size_t(std::ceil(params.gamma * double(n))), dim + 1), n - 1);

  std::vector<std::vector<double>> good(dim), bad(dim);
  for (size_t i = 0; i < n; ++i) {
    const std::vector<double> flat = (*model_set)[size_t(order[i].first)]->encoded.flatten();
    for (size_t d = 0; d < dim; ++d)
      (i < n_good ? good[d] : bad[d]).push_back(flat[d]);
  }

  auto scott_bw = [&](const std::vector<double>& xs) {
    double mean = 0.0;
    for (const double x : xs) mean += x;
    mean /= double(xs.size());
    double var = 0.0;
    for (const double x : xs) var += (x - mean) * (x - mean);
    var /= double(xs.size());
    const double bw = std::sqrt(var) * std::pow(double(xs.size()), -0.2);
    return std::max(bw, params.bandwidth_floor);
  };
  std::vector<double> bw_good(dim), bw_bad(dim);
  for (size_t d = 0; d < dim; ++d) {
    bw_good[d] = scott_bw(good[d]);
    bw_bad[d] = scott_bw(bad[d]);
  }
  auto log_kde = [](const std::vector<double>& centers, double bw, double x) {
    double acc = 0.0;
    for (const double mu : centers) acc += gaussian(x, mu, bw);
    return std::log(acc / double(centers.size()) + 1e-300);
  };

  std::vector<double> best_flat;
  double best_ratio = -kInf;
  for (int c = 0; c < params.n_candidates; ++c) {
    std::vector<double> flat(dim);
    double ratio = 0.0;
    for (size_t d = 0; d < dim; ++d) {
      const double center = good[d][rng.below(good[d].size())];
      const double x = std::clamp(center + bw_good[d] * rng.normal(), 0.0, 1.0);
      flat[d] = x;
      ratio += log_kde(good[d], bw_good[d], x) - log_kde(bad[d], bw_bad[d], x);
    }
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_flat = std::move(flat);
    }
  }

  Trial t = trial_from_encoded(space, encoded_from_flat(space, best_flat), trial_id,
                               slot.resource, slot.rung, slot.bracket, rng_seed, "bohb");
  return t;
}

bool dominates(const std::vector<double>& a, const std::vector<double>& b,
               const std::vector<bool>& minimize) {
  bool strict = false;
  for (size_t i = 0; i < a.size(); ++i) {
    const double av = minimize[i] ? a[i] : -a[i];
    const double bv = minimize[i] ? b[i] : -b[i];
    if (av > bv) return false;
    if (av < bv) strict = true;
  }
  return strict;
}

void archive_insert(ParetoArchive& archive, ParetoEntry entry) {
  if (entry.objectives.size() != archive.minimize.size())
    throw SearchError("archive_insert: objective vector length " +
                      std::to_string(entry.objectives.size()) + " != orientation length " +
                      std::to_string(archive.minimize.size()));
  for (const ParetoEntry& existing : archive.entries) {
    if (dominates(existing.objectives, entry.objectives, archive.minimize)) return;
    if (existing.objectives == entry.objectives && existing.sample == entry.sample)
      return;  // exact duplicate
  }
  std::erase_if(archive.entries, [&](const ParetoEntry& existing) {
    return dominates(entry.objectives, existing.objectives, archive.minimize);
  });
  archive.entries.push_back(std::move(entry));
}

Trial ea_step(const ParetoArchive& archive, const SearchSpace& space, std::uint64_t rng_seed,
              const EaParams& params, std::int64_t trial_id, std::int64_t resource) {
  Rng rng(rng_seed);
  if (archive.entries.empty()) {
    const std::uint64_t sub = rng.next_u64();
    auto [encoded, sample] = vega::sample(space, sub);
    Trial t;
    t.trial_id = trial_id;
    t.sample = std::move(sample);
    t.sample.sampler = "ea-random";
    t.encoded = std::move(encoded);
    t.resource = resource;
    return t;
  }

  const size_t parent_idx = rng.below(archive.entries.size());
  const ParetoEntry& parent = archive.entries[parent_idx];
  std::vector<double> flat = parent.encoded.flatten();
  const ParetoEntry* other = nullptr;
  if (params.crossover_rate > 0.0 && archive.entries.size() > 1)
    other = &archive.entries[rng.below(archive.entries.size())];
  const std::vector<double> other_flat = other ? other->encoded.flatten() : flat;

  for (size_t d = 0; d < flat.size(); ++d) {
    if (other && rng.uniform() < params.crossover_rate) flat[d] = other_flat[d];
    if (rng.uniform() < params.mutation_rate) {
      flat[d] = rng.uniform();
    } else {
      flat[d] = std::clamp(flat[d] + params.sigma * rng.normal(), 0.0, 1.0);
    }
  }

  Trial t = trial_from_encoded(space, encoded_from_flat(space, flat), trial_id, resource, 0,
                               0, rng_seed, "ea");
  if (parent.trial_id >= 0) t.parent_trial = parent.trial_id;
  return t;
}

}  // namespace vega
