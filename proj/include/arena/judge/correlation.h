#ifndef ARENA_JUDGE_CORRELATION_H_
#define ARENA_JUDGE_CORRELATION_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "arena/judge/scores.h"
#include "arena/rating/types.h"
#include "arena/task.h"

namespace arena::judge {

// Sample Pearson correlation. Empty when either input has zero variance.
// DomainError on length mismatch or fewer than two points.
std::optional<double> pearson_correlation(std::span<const double> x,
                                          std::span<const double> y);

// AWins -> +1, BWins -> -1, Tie and BothBad -> 0.
int encode_vote(rating::BattleOutcome outcome);

struct EncodedVote {
  std::string battle_id;
  Task task = Task::kTextToImage;
  int value = 0;
};

enum class Side { kLeft, kRight };
std::string_view to_string(Side side);
Side parse_side(std::string_view name);

using ScoreKey = std::pair<std::string, Side>;  // (battle id, side)
using ScoreMap = std::map<ScoreKey, SubScores>;

// Correlates the vote encoding with (left - right) of `subscore`.
// ValidationError listing the battles that lack a score on either side.
std::optional<double> correlate_metric_with_votes(const ScoreMap& scores,
                                                  std::span<const EncodedVote> votes,
                                                  Subscore subscore);

// Scores per metric, read from line-delimited records
// {metric?, battle_id, side, semantics, naturalness, artifacts}. Records
// without a metric belong to "judge".
std::map<std::string, ScoreMap> load_score_fixture(std::istream& in);
std::map<std::string, ScoreMap> load_score_fixture(const std::filesystem::path& path);

// One uniform score per output, shared by all subscores.
ScoreMap random_scores(std::span<const EncodedVote> votes, std::uint64_t seed);

// Metric x (task, subscore) table of correlations.
struct CorrelationReport {
  std::vector<std::string> metrics;
  std::vector<Task> tasks;
  std::vector<Subscore> subscores;
  std::map<std::tuple<std::string, Task, Subscore>, std::optional<double>> cells;

  void write_table(std::ostream& out) const;
  void write_csv(std::ostream& out) const;
};

// Evaluates each metric on every task for which it has scores. A metric
// covering only part of a task's votes is a ValidationError.
CorrelationReport build_correlation_report(
    const std::vector<std::pair<std::string, ScoreMap>>& metrics,
    std::span<const EncodedVote> votes, std::span<const Subscore> subscores);

}  // namespace arena::judge

#endif  // ARENA_JUDGE_CORRELATION_H_
