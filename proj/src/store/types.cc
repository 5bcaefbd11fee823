#include "arena/store/types.h"

#include "arena/errors.h"

namespace arena::store {

std::string_view to_string(Safety::Status status) {
  switch (status) {
    case Safety::Status::kUnchecked:
      return "unchecked";
    case Safety::Status::kSafe:
      return "safe";
    case Safety::Status::kUnsafe:
      return "unsafe";
  }
  return "unknown";
}

Safety::Status parse_safety_status(std::string_view name) {
  for (auto s : {Safety::Status::kUnchecked, Safety::Status::kSafe,
                 Safety::Status::kUnsafe}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError("unknown safety status '" + std::string(name) + "'");
}

std::string_view to_string(BattleState state) {
  switch (state) {
    case BattleState::kOpen:
      return "open";
    case BattleState::kVoted:
      return "voted";
    case BattleState::kRevealed:
      return "revealed";
  }
  return "unknown";
}

BattleState parse_battle_state(std::string_view name) {
  for (auto s : {BattleState::kOpen, BattleState::kVoted, BattleState::kRevealed}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError("unknown battle state '" + std::string(name) + "'");
}

std::string_view to_string(SafetyPolicy policy) {
  return policy == SafetyPolicy::kSafeOnly ? "safe_only" : "all";
}

SafetyPolicy parse_safety_policy(std::string_view name) {
  if (name == "safe_only") return SafetyPolicy::kSafeOnly;
  if (name == "all") return SafetyPolicy::kAll;
  throw ValidationError("unknown safety policy '" + std::string(name) +
                        "' (expected safe_only or all)");
}

void Prompt::validate() const {
  if (id.empty()) throw ValidationError("prompt id must not be empty");
  const bool editing = task == Task::kImageEditing;
  if (editing && (!source_image_ref || source_image_ref->empty()))
    throw ValidationError("image editing prompt '" + id +
                          "' needs a source image reference");
  if (!editing && source_image_ref)
    throw ValidationError("prompt '" + id +
                          "' carries a source image but is not an editing prompt");
}

}  // namespace arena::store
