#include "arena/judge/scores.h"

#include <cmath>
#include <string>

#include "arena/errors.h"

namespace arena::judge {

std::string_view to_string(Subscore subscore) {
  switch (subscore) {
    case Subscore::kSemantics: return "semantics";
    case Subscore::kQuality: return "quality";
    case Subscore::kOverall: return "overall";
  }
  return "?";
}

Subscore parse_subscore(std::string_view name) {
  if (name == "semantics") return Subscore::kSemantics;
  if (name == "quality") return Subscore::kQuality;
  if (name == "overall") return Subscore::kOverall;
  throw ValidationError("unknown subscore '" + std::string(name) +
                        "' (expected semantics, quality or overall)");
}

double select(const SubScores& scores, Subscore subscore) {
  switch (subscore) {
    case Subscore::kSemantics: return scores.semantics;
    case Subscore::kQuality: return scores.quality;
    case Subscore::kOverall: return scores.overall;
  }
  return 0.0;
}

SubScores aggregate_scores(double semantics, double naturalness, double artifacts) {
  for (double v : {semantics, naturalness, artifacts})
    if (!std::isfinite(v) || v < 0.0 || v > 10.0)
      throw ValidationError("sub-score " + std::to_string(v) + " outside [0, 10]");
  SubScores s;
  s.semantics = semantics;
  s.quality = (naturalness + artifacts) / 2.0;
  s.overall = std::sqrt(s.semantics * s.quality);
  return s;
}

}  // namespace arena::judge
