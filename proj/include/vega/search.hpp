#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vega/sampler.hpp"

namespace vega {

struct SearchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TrialStatus { Ok, Failed, Timeout };

const char* to_string(TrialStatus s);
std::optional<TrialStatus> trial_status_from_string(const std::string& name);

/// One dispatched evaluation unit.
struct Trial {
  std::int64_t trial_id = 0;
  ConfigSample sample;
  EncodedSample encoded;
  std::int64_t resource = 1;
  int rung = 0;
  int bracket = 0;
  std::optional<std::int64_t> parent_trial;
};

struct TrialResult {
  std::int64_t trial_id = 0;
  int attempt = 0;
  std::map<std::string, double> metrics;
  std::vector<double> objectives;
  TrialStatus status = TrialStatus::Ok;
  double wall_time = 0.0;

  json to_json() const;
  static TrialResult from_json(const json& j);
};

/// n i.i.d. uniform trials at resource r0, ids start_id..start_id+n-1.
std::vector<Trial> propose_random(const SearchSpace& space, std::uint64_t rng_seed,
                                  std::int64_t n, std::int64_t r0 = 1,
                                  std::int64_t start_id = 0);

// ---------------------------------------------------------------------------
// ASHA: asynchronous successive halving

struct AshaDecision {
  enum class Kind { Promote, SampleNew, Finalize };
  Kind kind = Kind::SampleNew;
  std::int64_t trial_id = 0;
  int to_rung = 0;
  std::int64_t resource = 0;
};

/// Scheduler state. Rungs 0..max_rungs-1; resource at rung r is r0*eta^r.
/// Promotion is conservative: the just-completed trial is promoted iff it
/// sits in the current top-floor(n/eta) of its rung, has not been promoted
/// before, and fewer than floor(n/eta) promotions have been granted, so
/// |promoted[r]| <= floor(|rungs[r]|/eta) holds at all times. Ties break
/// toward the earlier trial_id.
struct AshaState {
  int eta = 3;
  std::int64_t r0 = 1;
  int max_rungs = 4;
  bool maximize = true;
  std::string primary_metric = "score";

  std::vector<std::vector<std::pair<std::int64_t, double>>> rungs;
  std::vector<std::set<std::int64_t>> promoted;
  std::map<std::int64_t, int> trial_rung;

  AshaState() = default;
  AshaState(int eta, std::int64_t r0, int max_rungs, bool maximize = true);

  std::int64_t resource_at(int rung) const;
  /// Trial ids in the top floor(n/eta) of a rung (score-ordered).
  std::vector<std::int64_t> top_slice(int rung) const;
};

/// Record that a trial is running at a rung (submission or promotion).
void asha_register(AshaState& state, std::int64_t trial_id, int rung);

/// Fold one completed result into the state and decide what to do next.
/// Failed/timeout results score -inf (+inf when minimizing) and are never
/// promoted. Throws SearchError for unregistered trials.
AshaDecision asha_on_result(AshaState& state, const TrialResult& result);

/// Older promotable trial, if any (highest rung first). Drives the rungs
/// to quiescence once no new samples are wanted.
std::optional<AshaDecision> asha_next_promotion(AshaState& state);

/// Best (trial_id, score) at the highest rung that has any finite score.
std::optional<std::pair<std::int64_t, double>> asha_best(const AshaState& state);

// ---------------------------------------------------------------------------
// BOHB-lite: TPE-style density-ratio proposals inside Hyperband brackets

/// Cycles successive-halving brackets s = s_max..0. Bracket s admits
/// n_s = ceil((s_max+1)/(s+1)) * eta^s new configs at resource
/// r_min * eta^(s_max - s).
class HyperbandBrackets {
 public:
  HyperbandBrackets() = default;
  HyperbandBrackets(int eta, std::int64_t r_min, std::int64_t r_max);

  struct Slot {
    int bracket = 0;
    int rung = 0;
    std::int64_t resource = 1;
  };
  /// Entry slot for the next new trial; advances the cycle.
  Slot next_slot();

  int s_max() const { return s_max_; }
  int eta() const { return eta_; }
  std::int64_t r_min() const { return r_min_; }
  std::int64_t resource_at(int rung) const;
  std::int64_t quota(int bracket) const;

 private:
  int eta_ = 3;
  std::int64_t r_min_ = 1;
  int s_max_ = 0;
  int current_ = 0;  // current bracket s
  std::int64_t issued_ = 0;
};

struct BohbObservation {
  EncodedSample encoded;
  double score = 0.0;
  std::int64_t resource = 1;
};

struct BohbParams {
  double gamma = 0.15;
  int n_candidates = 24;
  double bandwidth_floor = 1e-3;
  bool maximize = true;
};

/// Propose the next trial. With fewer than D+1 observations at the model
/// fidelity (the highest resource level with enough points) the proposal is
/// uniform random; otherwise the history splits at quantile gamma into
/// good/bad sets (|good| = min(max(ceil(gamma*N), D+1), N-1)), per-dimension
/// Gaussian KDEs are fit with Scott's-rule bandwidths (floor 1e-3), and the
/// best of n_candidates draws from the good model by density ratio wins.
/// Only score ranks matter, so any strictly increasing score transform
/// yields the same proposal.
Trial bohb_propose(const std::vector<BohbObservation>& history, const SearchSpace& space,
                   HyperbandBrackets& brackets, std::uint64_t rng_seed,
                   const BohbParams& params = {}, std::int64_t trial_id = 0);

// ---------------------------------------------------------------------------
// Multi-objective evolutionary search

struct ParetoEntry {
  ConfigSample sample;
  EncodedSample encoded;
  std::vector<double> objectives;
  std::int64_t trial_id = -1;  // originating trial, for lineage
};

/// Nondominated set of (sample, objective-vector) pairs.
struct ParetoArchive {
  std::vector<bool> minimize;  // orientation per objective
  std::vector<ParetoEntry> entries;
};

/// a strictly dominates b under the orientation flags.
bool dominates(const std::vector<double>& a, const std::vector<double>& b,
               const std::vector<bool>& minimize);

/// Insert iff not dominated; drops every entry the newcomer dominates;
/// exact duplicates leave the archive unchanged. Throws SearchError on
/// objective-length mismatch.
void archive_insert(ParetoArchive& archive, ParetoEntry entry);

struct EaParams {
  double mutation_rate = 0.3;
  double sigma = 0.1;
  double crossover_rate = 0.0;  // uniform coordinate mix when > 0
};

/// (mu+1)-style step: perturb a uniformly chosen archive parent
/// coordinate-wise (resample with probability mutation_rate, else Gaussian
/// jitter clamped to [0,1]). Falls back to a random sample while the
/// archive is empty.
Trial ea_step(const ParetoArchive& archive, const SearchSpace& space, std::uint64_t rng_seed,
              const EaParams& params = {}, std::int64_t trial_id = 0,
              std::int64_t resource = 1);

}  // namespace vega
