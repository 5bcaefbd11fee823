#include "arena/rating/bootstrap.h"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "arena/errors.h"
#include "arena/rating/bradley_terry.h"

namespace arena::rating {
namespace {

std::size_t distinct_models(std::span<const BattleRecord> battles) {
  std::unordered_set<std::string_view> seen;
  for (const BattleRecord& b : battles) {
    seen.insert(b.model_a);
    seen.insert(b.model_b);
  }
  return seen.size();
}

}  // namespace

RatingTable bootstrap_confidence_interval(std::span<const BattleRecord> battles,
                                          int rounds, std::uint64_t seed,
                                          const RatingConfig& config) {
  if (rounds < 1) throw DomainError("bootstrap needs at least one round");
  RatingTable table = fit_battles(battles, config);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, battles.size() - 1);
  std::vector<BattleRecord> sample(battles.size());

  for (int round = 0; round < rounds; ++round) {
    int redraws = 0;
    for (;;) {
      for (BattleRecord& slot : sample) slot = battles[pick(rng)];
      if (distinct_models(sample) >= 2) break;
      if (++redraws > kMaxRedraws)
        throw DomainError("bootstrap resample kept covering fewer than two models");
    }
    const RatingTable fit = fit_battles(sample, config);
    for (const auto& [model, sampled] : fit.entries) {
      RatingEntry& e = table.entries.at(model);
      e.ci_lower = e.ci_lower ? std::min(*e.ci_lower, sampled.rating)
                              : sampled.rating;
      e.ci_upper = e.ci_upper ? std::max(*e.ci_upper, sampled.rating)
                              : sampled.rating;
    }
  }
  return table;
}

}  // namespace arena::rating
