#ifndef ARENA_STORE_TYPES_H_
#define ARENA_STORE_TYPES_H_

#include <optional>
#include <string>
#include <string_view>

#include "arena/rating/types.h"
#include "arena/task.h"

namespace arena::store {

struct Safety {
  enum class Status { kUnchecked, kSafe, kUnsafe };

  Status status = Status::kUnchecked;
  std::string category;  // only meaningful for kUnsafe

  static Safety unchecked() { return {}; }
  static Safety safe() { return {Status::kSafe, {}}; }
  static Safety unsafe(std::string category) {
    return {Status::kUnsafe, std::move(category)};
  }
  bool is_safe() const { return status == Status::kSafe; }
  bool operator==(const Safety&) const = default;
};

std::string_view to_string(Safety::Status status);
Safety::Status parse_safety_status(std::string_view name);

struct Prompt {
  std::string id;
  Task task = Task::kTextToImage;
  std::string text;
  std::optional<std::string> source_image_ref;  // image editing only
  Safety safety;

  // ValidationError unless the source image is present exactly for
  // image-editing prompts.
  void validate() const;
};

enum class BattleState { kOpen, kVoted, kRevealed };

std::string_view to_string(BattleState state);
BattleState parse_battle_state(std::string_view name);

struct Battle {
  std::string id;
  Task task = Task::kTextToImage;
  std::string prompt_id;
  ModelId model_a;
  ModelId model_b;
  std::string output_a;
  std::string output_b;
  BattleState state = BattleState::kOpen;
  TimestampMs created_at = 0;
};

struct Vote {
  std::string battle_id;
  rating::BattleOutcome outcome = rating::BattleOutcome::kAWins;
  TimestampMs voted_at = 0;
  bool counted = true;
};

enum class SafetyPolicy { kSafeOnly, kAll };

// "safe_only" / "all".
std::string_view to_string(SafetyPolicy policy);
SafetyPolicy parse_safety_policy(std::string_view name);

}  // namespace arena::store

#endif  // ARENA_STORE_TYPES_H_
