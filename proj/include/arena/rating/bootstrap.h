#ifndef ARENA_RATING_BOOTSTRAP_H_
#define ARENA_RATING_BOOTSTRAP_H_

#include <cstdint>
#include <span>

#include "arena/rating/types.h"

namespace arena::rating {

inline constexpr int kDefaultBootstrapRounds = 100;

// Bootstrap bounds around the Bradley-Terry fit.
//
// Every round resamples |battles| records with replacement and refits; the
// lower bound is the smallest rating a model received in any round, the
// upper bound the largest. The point estimate is the fit on the full input.
// Rounds whose resample covers fewer than two models are redrawn, up to
// kMaxRedraws times before giving up with DomainError.
RatingTable bootstrap_confidence_interval(std::span<const BattleRecord> battles,
                                          int rounds, std::uint64_t seed,
                                          const RatingConfig& config);

inline constexpr int kMaxRedraws = 1000;

}  // namespace arena::rating

#endif  // ARENA_RATING_BOOTSTRAP_H_
