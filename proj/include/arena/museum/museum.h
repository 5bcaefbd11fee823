#ifndef ARENA_MUSEUM_MUSEUM_H_
#define ARENA_MUSEUM_MUSEUM_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arena/task.h"

namespace arena::museum {

enum class MediaType { kImage, kVideo };

std::string_view to_string(MediaType type);
MediaType parse_media_type(std::string_view name);

struct MuseumEntry {
  Task task = Task::kTextToImage;
  std::string prompt_id;
  std::string prompt_text;
  ModelId model_id;
  std::string artifact_uri;
  MediaType media_type = MediaType::kImage;
  // Input image of an editing prompt.
  std::optional<std::string> source_image_uri;
};

// All precomputed outputs for one (task, prompt_id), sorted by model id.
struct PromptGroup {
  Task task;
  std::string prompt_id;
  std::string prompt_text;
  std::optional<std::string> source_image_uri;
  MediaType media_type;
  std::vector<MuseumEntry> outputs;
};

enum class PairingStrategy { kUniformPair, kLeastBattledPair };

// Accepts "uniform"/"uniform_pair" and "balanced"/"least_battled".
PairingStrategy parse_pairing(std::string_view name);
std::string_view to_string(PairingStrategy strategy);

// Historical battle count for (prompt_id, unordered model pair).
using PairHistory = std::function<std::size_t(
    std::string_view prompt_id, const ModelId& a, const ModelId& b)>;

// What the user may see before voting.
struct PublicBattle {
  Task task;
  std::string prompt_id;
  std::string prompt_text;
  std::optional<std::string> source_image_uri;
  MediaType media_type;
  std::string output_a_uri;
  std::string output_b_uri;
};

// Model identities, released only through the reveal path.
struct SealedIdentities {
  ModelId model_a;
  ModelId model_b;
};

struct SampledBattle {
  PublicBattle visible;
  SealedIdentities sealed;
};

// Immutable index of precomputed outputs. Safe to sample concurrently.
class Museum {
 public:
  Museum() = default;

  // Line-delimited JSON records with task, prompt_id, prompt_text, model_id,
  // artifact_uri, media_type and, for image editing, source_image_uri.
  // ParseError carries the line number; duplicate (task, prompt, model)
  // keys and inconsistent prompt groups are rejected.
  static Museum ingest(std::istream& manifest);
  static Museum ingest_file(const std::filesystem::path& path);

  std::size_t entry_count() const;
  std::size_t group_count() const { return groups_.size(); }
  std::vector<const PromptGroup*> groups(Task task) const;
  const PromptGroup* find_group(Task task, std::string_view prompt_id) const;
  bool can_sample(Task task) const;

  // Picks a prompt group uniformly among those with at least two models,
  // then a pair inside it according to `strategy`; sides are shuffled.
  // Deterministic for fixed (seed, history). UnavailableError when no group
  // qualifies.
  SampledBattle sample_battle(Task task, PairingStrategy strategy,
                              const PairHistory& history,
                              std::uint64_t seed) const;

 private:
  std::vector<PromptGroup> groups_;  // sorted by (task, prompt_id)
};

// Syntactic check for artifact references: non-empty, no whitespace or
// control characters.
bool is_valid_uri(std::string_view uri);

}  // namespace arena::museum

#endif  // ARENA_MUSEUM_MUSEUM_H_
