#include "arena/rating/elo.h"

#include <cmath>
#include <string>

#include "arena/errors.h"

namespace arena::rating {

double expected_score(double r_i, double r_j, double alpha) {
  if (!std::isfinite(r_i) || !std::isfinite(r_j))
    throw DomainError("expected_score: ratings must be finite");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw DomainError("expected_score: alpha must be positive");
  return 1.0 / (1.0 + std::pow(10.0, (r_j - r_i) / alpha));
}

std::pair<double, double> elo_update(double r_i, double r_j,
                                     BattleOutcome outcome,
                                     const RatingConfig& config) {
  config.validate();
  const std::optional<double> score =
      outcome_score(outcome, config.bothbad_policy);
  if (!score) return {r_i, r_j};
  const double delta =
      config.k_factor * (*score - expected_score(r_i, r_j, config.alpha));
  // E(j, i) = 1 - E(i, j), so B's change is exactly -delta.
  return {r_i + delta, r_j - delta};
}

RatingTable replay_online_elo(std::span<const BattleRecord> battles,
                              const RatingConfig& config) {
  config.validate();
  RatingTable table;
  auto entry = [&](const ModelId& id) -> RatingEntry& {
    auto [it, inserted] = table.entries.try_emplace(id);
    if (inserted) it->second.rating = config.initial_rating;
    return it->second;
  };
  for (const BattleRecord& battle : battles) {
    if (battle.model_a == battle.model_b)
      throw DomainError("battle between '" + battle.model_a + "' and itself");
    RatingEntry& a = entry(battle.model_a);
    RatingEntry& b = entry(battle.model_b);
    std::tie(a.rating, b.rating) =
        elo_update(a.rating, b.rating, battle.outcome, config);
    ++a.battle_count;
    ++b.battle_count;
  }
  return table;
}

}  // namespace arena::rating
