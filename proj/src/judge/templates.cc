#include "arena/judge/templates.h"

#include <fstream>
#include <sstream>

#include "arena/errors.h"

namespace arena::judge {

std::string_view to_string(JudgeAspect aspect) {
  return aspect == JudgeAspect::kSemanticConsistency ? "semantic_consistency"
                                                     : "perceptual_quality";
}

JudgeAspect parse_aspect(std::string_view name) {
  if (name == "semantic_consistency") return JudgeAspect::kSemanticConsistency;
  if (name == "perceptual_quality") return JudgeAspect::kPerceptualQuality;
  throw ValidationError("unknown judge aspect '" + std::string(name) + "'");
}

void JudgeTemplate::validate() const {
  const bool has = body.find(kPromptPlaceholder) != std::string::npos;
  if (aspect == JudgeAspect::kSemanticConsistency && !has)
    throw ValidationError("semantic_consistency template for " +
                          std::string(to_string(task)) +
                          " lacks the <prompt> placeholder");
  if (aspect == JudgeAspect::kPerceptualQuality && has)
    throw ValidationError("perceptual_quality template for " +
                          std::string(to_string(task)) +
                          " must not contain the <prompt> placeholder");
}

std::string render_judge_prompt(const JudgeTemplate& tmpl,
                                std::string_view prompt_text) {
  std::string out;
  out.reserve(tmpl.body.size() + prompt_text.size());
  std::size_t pos = 0;
  for (;;) {
    const auto hit = tmpl.body.find(kPromptPlaceholder, pos);
    if (hit == std::string::npos) break;
    out.append(tmpl.body, pos, hit - pos);
    out.append(prompt_text);
    pos = hit + kPromptPlaceholder.size();
  }
  out.append(tmpl.body, pos, std::string::npos);
  return out;
}

TemplateRegistry TemplateRegistry::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw NotFoundError("template directory not found: " + dir.string());
  TemplateRegistry registry;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto& path = entry.path();
    if (!entry.is_regular_file() || path.extension() != ".txt") continue;
    const std::string stem = path.stem().string();
    const auto dot = stem.find('.');
    if (dot == std::string::npos)
      throw ValidationError("template file name must be <task>.<aspect>.txt: " +
                            path.filename().string());
    JudgeTemplate tmpl{parse_task(stem.substr(0, dot)),
                       parse_aspect(stem.substr(dot + 1)), {}};
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    tmpl.body = buf.str();
    registry.add(std::move(tmpl));
  }
  return registry;
}

void TemplateRegistry::add(JudgeTemplate tmpl) {
  tmpl.validate();
  const auto key = std::make_pair(tmpl.task, tmpl.aspect);
  templates_.insert_or_assign(key, std::move(tmpl));
}

const JudgeTemplate& TemplateRegistry::get(Task task, JudgeAspect aspect) const {
  auto it = templates_.find({task, aspect});
  if (it == templates_.end())
    throw NotFoundError("no " + std::string(to_string(aspect)) + " template for " +
                        std::string(to_string(task)));
  return it->second;
}

bool TemplateRegistry::contains(Task task, JudgeAspect aspect) const {
  return templates_.count({task, aspect}) != 0;
}

}  // namespace arena::judge
