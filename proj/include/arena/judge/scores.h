#ifndef ARENA_JUDGE_SCORES_H_
#define ARENA_JUDGE_SCORES_H_

#include <string_view>

namespace arena::judge {

struct SubScores {
  double semantics = 0.0;
  double quality = 0.0;
  double overall = 0.0;
};

enum class Subscore { kSemantics, kQuality, kOverall };

std::string_view to_string(Subscore subscore);
Subscore parse_subscore(std::string_view name);
double select(const SubScores& scores, Subscore subscore);

// quality = (naturalness + artifacts) / 2; overall = sqrt(semantics * quality).
// Inputs outside [0, 10] raise ValidationError.
SubScores aggregate_scores(double semantics, double naturalness, double artifacts);

}  // namespace arena::judge

#endif  // ARENA_JUDGE_SCORES_H_
