#ifndef ARENA_TASK_H_
#define ARENA_TASK_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace arena {

enum class Task { kTextToImage, kImageEditing, kTextToVideo };

inline constexpr std::array<Task, 3> kAllTasks = {
    Task::kTextToImage, Task::kImageEditing, Task::kTextToVideo};

// Wire names: "text_to_image", "image_editing", "text_to_video".
std::string_view to_string(Task task);

// Throws ValidationError on unknown names.
Task parse_task(std::string_view name);

using ModelId = std::string;

// UTC milliseconds since the Unix epoch.
using TimestampMs = std::int64_t;

}  // namespace arena

#endif  // ARENA_TASK_H_
