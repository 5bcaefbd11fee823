#ifndef ARENA_JUDGE_TEMPLATES_H_
#define ARENA_JUDGE_TEMPLATES_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "arena/task.h"

namespace arena::judge {

enum class JudgeAspect { kSemanticConsistency, kPerceptualQuality };

// "semantic_consistency" / "perceptual_quality".
std::string_view to_string(JudgeAspect aspect);
JudgeAspect parse_aspect(std::string_view name);

inline constexpr std::string_view kPromptPlaceholder = "<prompt>";

struct JudgeTemplate {
  Task task;
  JudgeAspect aspect;
  std::string body;

  // Semantic-consistency bodies must contain the placeholder; perceptual
  // quality bodies must not. Throws ValidationError.
  void validate() const;
};

// Substitutes every placeholder occurrence with `prompt_text`.
std::string render_judge_prompt(const JudgeTemplate& tmpl,
                                std::string_view prompt_text);

// Templates keyed by (task, aspect), loaded from files named
// "<task>.<aspect>.txt".
class TemplateRegistry {
 public:
  static TemplateRegistry load_directory(const std::filesystem::path& dir);

  void add(JudgeTemplate tmpl);
  // NotFoundError when no template is registered for the key.
  const JudgeTemplate& get(Task task, JudgeAspect aspect) const;
  bool contains(Task task, JudgeAspect aspect) const;
  std::size_t size() const { return templates_.size(); }

 private:
  std::map<std::pair<Task, JudgeAspect>, JudgeTemplate> templates_;
};

}  // namespace arena::judge

#endif  // ARENA_JUDGE_TEMPLATES_H_
