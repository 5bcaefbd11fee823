#ifndef ARENA_RATING_ELO_H_
#define ARENA_RATING_ELO_H_

#include <span>
#include <utility>

#include "arena/rating/types.h"

namespace arena::rating {

// Probability that a player rated `r_i` beats one rated `r_j`:
// 1 / (1 + 10^((r_j - r_i) / alpha)).
double expected_score(double r_i, double r_j, double alpha);

// One online Elo step. The update is zero-sum: whatever A gains B loses.
// BothBad under kDiscard returns the inputs unchanged.
std::pair<double, double> elo_update(double r_i, double r_j,
                                     BattleOutcome outcome,
                                     const RatingConfig& config);

// Applies elo_update over `battles` in order. Record weights are ignored;
// each record is one match.
RatingTable replay_online_elo(std::span<const BattleRecord> battles,
                              const RatingConfig& config);

}  // namespace arena::rating

#endif  // ARENA_RATING_ELO_H_
