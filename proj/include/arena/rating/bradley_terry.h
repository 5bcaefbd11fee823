#ifndef ARENA_RATING_BRADLEY_TERRY_H_
#define ARENA_RATING_BRADLEY_TERRY_H_

#include <span>
#include <stdexcept>
#include <string>

#include "arena/rating/types.h"

namespace arena::rating {

// Duplicates every vote, then splits each duplicated tie one unit each way.
// A decisive vote of weight w contributes 2w to the winner's row; a tie
// (and BothBad under kAsTie) contributes w to both directions. Models are
// ordered by first appearance.
PairwiseCounts build_pairwise_counts(std::span<const BattleRecord> battles,
                                     const RatingConfig& config);

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& message, RatingTable best,
                      double gradient_norm)
      : std::runtime_error(message),
        best_(std::move(best)),
        gradient_norm_(gradient_norm) {}

  const RatingTable& best() const { return best_; }
  double gradient_norm() const { return gradient_norm_; }

 private:
  RatingTable best_;
  double gradient_norm_;
};

// Maximum-likelihood Bradley-Terry ratings on the Elo scale.
//
// Maximizes sum_{i != j} w(i, j) * log P(i beats j) with P from
// expected_score, using damped Newton steps until the Elo-scale gradient
// norm is at most convergence_tol. Each connected component of the
// comparison graph is centered on config.anchor independently; entries carry
// their component index. Components without a finite MLE (some model never
// wins or never loses inside it) get the config.l2_reg penalty.
//
// Throws DomainError for fewer than two models and NonConvergenceError
// (carrying the best iterate) when max_iterations is exhausted.
RatingTable fit_bradley_terry(const PairwiseCounts& counts,
                              const RatingConfig& config);

// build_pairwise_counts followed by fit_bradley_terry.
RatingTable fit_battles(std::span<const BattleRecord> battles,
                        const RatingConfig& config);

}  // namespace arena::rating

#endif  // ARENA_RATING_BRADLEY_TERRY_H_
