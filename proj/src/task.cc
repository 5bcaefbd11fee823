#include "arena/task.h"

#include "arena/errors.h"

namespace arena {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kTextToImage:
      return "text_to_image";
    case Task::kImageEditing:
      return "image_editing";
    case Task::kTextToVideo:
      return "text_to_video";
  }
  return "unknown";
}

Task parse_task(std::string_view name) {
  for (Task task : kAllTasks) {
    if (to_string(task) == name) return task;
  }
  throw ValidationError("unknown task '" + std::string(name) +
                        "' (expected text_to_image, image_editing or "
                        "text_to_video)");
}

}  // namespace arena
