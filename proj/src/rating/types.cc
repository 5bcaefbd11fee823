#include "arena/rating/types.h"

#include <algorithm>
#include <cmath>

#include "arena/errors.h"

namespace arena::rating {

void RatingConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw DomainError("alpha must be positive and finite");
  if (!(k_factor > 0.0) || !std::isfinite(k_factor))
    throw DomainError("k_factor must be positive and finite");
  if (!(convergence_tol > 0.0))
    throw DomainError("convergence_tol must be positive");
  if (max_iterations < 1) throw DomainError("max_iterations must be >= 1");
  if (!std::isfinite(anchor) || !std::isfinite(initial_rating))
    throw DomainError("anchor and initial_rating must be finite");
  if (!(l2_reg > 0.0) || !std::isfinite(l2_reg))
    throw DomainError("l2_reg must be positive and finite");
}

std::string_view to_string(BattleOutcome outcome) {
  switch (outcome) {
    case BattleOutcome::kAWins:
      return "leftvote";
    case BattleOutcome::kBWins:
      return "rightvote";
    case BattleOutcome::kTie:
      return "tievote";
    case BattleOutcome::kBothBad:
      return "bothbad_vote";
  }
  return "unknown";
}

std::optional<BattleOutcome> parse_outcome(std::string_view name) {
  for (auto outcome : {BattleOutcome::kAWins, BattleOutcome::kBWins,
                       BattleOutcome::kTie, BattleOutcome::kBothBad}) {
    if (to_string(outcome) == name) return outcome;
  }
  return std::nullopt;
}

std::optional<double> outcome_score(BattleOutcome outcome,
                                    BothBadPolicy policy) {
  switch (outcome) {
    case BattleOutcome::kAWins:
      return 1.0;
    case BattleOutcome::kBWins:
      return 0.0;
    case BattleOutcome::kTie:
      return 0.5;
    case BattleOutcome::kBothBad:
      if (policy == BothBadPolicy::kDiscard) return std::nullopt;
      return 0.5;
  }
  return std::nullopt;
}

PairwiseCounts::PairwiseCounts(std::vector<ModelId> models)
    : models_(std::move(models)), w_(models_.size() * models_.size(), 0.0) {}

std::optional<std::size_t> PairwiseCounts::index_of(
    std::string_view model) const {
  auto it = std::find(models_.begin(), models_.end(), model);
  if (it == models_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - models_.begin());
}

void PairwiseCounts::add(std::size_t i, std::size_t j, double amount) {
  if (i == j) throw DomainError("self-comparison in pairwise counts");
  if (!(amount >= 0.0) || !std::isfinite(amount))
    throw DomainError("pairwise counts must be finite and non-negative");
  w_[i * size() + j] += amount;
}

PairwiseCounts PairwiseCounts::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor))
    throw DomainError("scale factor must be finite and non-negative");
  PairwiseCounts out = *this;
  for (double& v : out.w_) v *= factor;
  return out;
}

std::vector<ModelId> RatingTable::ranked_models() const {
  std::vector<ModelId> models;
  models.reserve(entries.size());
  for (const auto& [id, entry] : entries) models.push_back(id);
  std::stable_sort(models.begin(), models.end(),
                   [this](const ModelId& a, const ModelId& b) {
                     return entries.at(a).rating > entries.at(b).rating;
                   });
  return models;
}

}  // namespace arena::rating
