#ifndef ARENA_RATING_TYPES_H_
#define ARENA_RATING_TYPES_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "arena/task.h"

namespace arena::rating {

enum class BothBadPolicy { kAsTie, kDiscard };

struct RatingConfig {
  double alpha = 400.0;            // logistic scale of the win probability
  double anchor = 1000.0;          // mean rating of each fitted component
  double k_factor = 32.0;          // online Elo step size
  double initial_rating = 1000.0;  // online Elo starting point
  double convergence_tol = 1e-8;   // BT gradient norm, Elo scale
  int max_iterations = 1000;
  BothBadPolicy bothbad_policy = BothBadPolicy::kAsTie;
  // L2 penalty on centered natural-log strengths. Only applied to components
  // whose maximum likelihood estimate does not exist (a model that never
  // loses, or never wins, within its component).
  double l2_reg = 1e-6;

  // Throws DomainError when a field is outside its legal range.
  void validate() const;
};

// Left/right in the UI map to A/B.
enum class BattleOutcome { kAWins, kBWins, kTie, kBothBad };

// Wire names used by the vote log and the HTTP API:
// "leftvote", "rightvote", "tievote", "bothbad_vote".
std::string_view to_string(BattleOutcome outcome);
std::optional<BattleOutcome> parse_outcome(std::string_view name);

// S(a, b): 1 for an A win, 0.5 for a tie, 0 for a loss. Empty when the
// outcome is discarded under `policy`.
std::optional<double> outcome_score(BattleOutcome outcome,
                                    BothBadPolicy policy);

struct BattleRecord {
  ModelId model_a;
  ModelId model_b;
  BattleOutcome outcome = BattleOutcome::kAWins;
  double weight = 1.0;

  bool operator==(const BattleRecord&) const = default;
};

// w(i, j) is the weighted number of times models[i] beat models[j].
class PairwiseCounts {
 public:
  PairwiseCounts() = default;
  explicit PairwiseCounts(std::vector<ModelId> models);

  std::size_t size() const { return models_.size(); }
  const std::vector<ModelId>& models() const { return models_; }
  std::optional<std::size_t> index_of(std::string_view model) const;

  double w(std::size_t i, std::size_t j) const { return w_[i * size() + j]; }
  // Rejects diagonal, negative or non-finite updates with DomainError.
  void add(std::size_t i, std::size_t j, double amount);

  PairwiseCounts scaled(double factor) const;

 private:
  std::vector<ModelId> models_;
  std::vector<double> w_;
};

struct RatingEntry {
  double rating = 0.0;
  std::optional<double> ci_lower;
  std::optional<double> ci_upper;
  std::size_t battle_count = 0;
  // Connected component of the comparison graph. Ratings are only
  // comparable within one component.
  int component = 0;
};

struct RatingTable {
  std::map<ModelId, RatingEntry> entries;
  int components = 1;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  const RatingEntry& at(const ModelId& model) const { return entries.at(model); }

  // Model ids by rating descending, ties broken by id.
  std::vector<ModelId> ranked_models() const;
};

}  // namespace arena::rating

#endif  // ARENA_RATING_TYPES_H_
