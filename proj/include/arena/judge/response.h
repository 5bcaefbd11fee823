#ifndef ARENA_JUDGE_RESPONSE_H_
#define ARENA_JUDGE_RESPONSE_H_

#include <string>
#include <string_view>
#include <vector>

#include "arena/judge/templates.h"

namespace arena::judge {

struct JudgeResponse {
  std::string raw;
  std::vector<double> score;
  std::string reasoning;
};

// Number of scores each aspect must return: 1 for semantic consistency,
// 2 (naturalness, artifacts) for perceptual quality.
std::size_t expected_arity(JudgeAspect aspect);

// Finds the first well-formed JSON object holding both "score" and
// "reasoning" anywhere in `raw` (surrounding prose and code fences are
// ignored) and checks score arity and the [0, 10] range.
//
// ParseError (carrying `raw`) when no such object exists; ValidationError
// on arity or range violations.
JudgeResponse parse_judge_response(std::string_view raw, JudgeAspect aspect);

// {"score": [...], "reasoning": "..."}
std::string serialize_judge_response(const JudgeResponse& response);

}  // namespace arena::judge

#endif  // ARENA_JUDGE_RESPONSE_H_
