#include "arena/judge/response.h"

#include <cmath>

#include <json.hpp>

#include "arena/errors.h"

namespace arena::judge {
namespace {

using Json = nlohmann::ordered_json;

// End of the brace-balanced region starting at raw[begin] == '{', skipping
// braces inside string literals. npos if unbalanced.
std::size_t match_brace(std::string_view raw, std::size_t begin) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = begin; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i;
  }
  return std::string_view::npos;
}

}  // namespace

std::size_t expected_arity(JudgeAspect aspect) {
  return aspect == JudgeAspect::kSemanticConsistency ? 1 : 2;
}

JudgeResponse parse_judge_response(std::string_view raw, JudgeAspect aspect) {
  for (auto pos = raw.find('{'); pos != std::string_view::npos;
       pos = raw.find('{', pos + 1)) {
    const auto end = match_brace(raw, pos);
    if (end == std::string_view::npos) continue;
    Json obj = Json::parse(raw.substr(pos, end - pos + 1), nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("score") ||
        !obj.contains("reasoning"))
      continue;

    JudgeResponse out;
    out.raw = std::string(raw);
    const Json& score = obj["score"];
    if (!score.is_array())
      throw ValidationError("judge score must be a list");
    for (const auto& v : score) {
      if (!v.is_number()) throw ValidationError("judge score entries must be numbers");
      const double x = v.get<double>();
      if (!std::isfinite(x) || x < 0.0 || x > 10.0)
        throw ValidationError("judge score " + v.dump() + " outside [0, 10]");
      out.score.push_back(x);
    }
    if (out.score.size() != expected_arity(aspect))
      throw ValidationError(std::string(to_string(aspect)) + " expects " +
                            std::to_string(expected_arity(aspect)) +
                            " score(s), got " + std::to_string(out.score.size()));
    const Json& reasoning = obj["reasoning"];
    out.reasoning = reasoning.is_string() ? reasoning.get<std::string>() : reasoning.dump();
    return out;
  }
  throw ParseError("no JSON object with score and reasoning in judge response", 0,
                   std::string(raw));
}

std::string serialize_judge_response(const JudgeResponse& response) {
  Json obj;
  obj["score"] = response.score;
  obj["reasoning"] = response.reasoning;
  return obj.dump();
}

}  // namespace arena::judge
