#include "arena/museum/museum.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <random>

#include <json.hpp>

#include "arena/errors.h"

namespace arena::museum {

std::string_view to_string(MediaType type) {
  return type == MediaType::kVideo ? "video" : "image";
}

MediaType parse_media_type(std::string_view name) {
  if (name == "image") return MediaType::kImage;
  if (name == "video") return MediaType::kVideo;
  throw ValidationError("unknown media_type '" + std::string(name) + "'");
}

PairingStrategy parse_pairing(std::string_view name) {
  if (name == "uniform" || name == "uniform_pair") return PairingStrategy::kUniformPair;
  if (name == "balanced" || name == "least_battled")
    return PairingStrategy::kLeastBattledPair;
  throw ValidationError("unknown pairing strategy '" + std::string(name) +
                        "' (expected uniform or balanced)");
}

std::string_view to_string(PairingStrategy strategy) {
  return strategy == PairingStrategy::kUniformPair ? "uniform" : "balanced";
}

bool is_valid_uri(std::string_view uri) {
  if (uri.empty()) return false;
  return std::none_of(uri.begin(), uri.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u <= 0x20 || u == 0x7f;
  });
}

Museum Museum::ingest(std::istream& manifest) {
  std::map<std::pair<Task, std::string>, PromptGroup> groups;
  std::string line;
  std::size_t number = 0;
  while (std::getline(manifest, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    MuseumEntry e;
    try {
      const auto j = nlohmann::json::parse(line);
      e.task = parse_task(j.at("task").get<std::string>());
      e.prompt_id = j.at("prompt_id").get<std::string>();
      e.prompt_text = j.at("prompt_text").get<std::string>();
      e.model_id = j.at("model_id").get<std::string>();
      e.artifact_uri = j.at("artifact_uri").get<std::string>();
      e.media_type = parse_media_type(j.at("media_type").get<std::string>());
      if (j.contains("source_image_uri") && !j["source_image_uri"].is_null())
        e.source_image_uri = j["source_image_uri"].get<std::string>();
    } catch (const std::exception& ex) {
      throw ParseError(ex.what(), number, line);
    }
    if (e.prompt_id.empty() || e.model_id.empty())
      throw ParseError("prompt_id and model_id must not be empty", number, line);
    if (!is_valid_uri(e.artifact_uri))
      throw ParseError("invalid artifact_uri '" + e.artifact_uri + "'", number, line);
    if ((e.media_type == MediaType::kVideo) != (e.task == Task::kTextToVideo))
      throw ParseError("media_type " + std::string(to_string(e.media_type)) +
                           " does not fit task " + std::string(to_string(e.task)),
                       number, line);
    const bool editing = e.task == Task::kImageEditing;
    if (editing != e.source_image_uri.has_value() ||
        (e.source_image_uri && !is_valid_uri(*e.source_image_uri)))
      throw ParseError(editing ? "image editing entries need a valid source_image_uri"
                               : "source_image_uri is only allowed for image editing",
                       number, line);

    auto [it, fresh] = groups.try_emplace({e.task, e.prompt_id});
    PromptGroup& g = it->second;
    if (fresh) {
      g = PromptGroup{e.task, e.prompt_id, e.prompt_text, e.source_image_uri,
                      e.media_type, {}};
    } else if (g.prompt_text != e.prompt_text ||
               g.source_image_uri != e.source_image_uri) {
      throw ParseError("prompt '" + e.prompt_id + "' has conflicting text or source image",
                       number, line);
    }
    for (const MuseumEntry& other : g.outputs) {
      if (other.model_id == e.model_id)
        throw ParseError("duplicate entry (" + std::string(to_string(e.task)) + ", " +
                             e.prompt_id + ", " + e.model_id + ")",
                         number, line);
    }
    g.outputs.push_back(std::move(e));
  }

  Museum museum;
  for (auto& [key, g] : groups) {
    std::sort(g.outputs.begin(), g.outputs.end(),
              [](const MuseumEntry& a, const MuseumEntry& b) {
                return a.model_id < b.model_id;
              });
    museum.groups_.push_back(std::move(g));
  }
  return museum;
}

Museum Museum::ingest_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest " + path.string());
  return ingest(in);
}

std::size_t Museum::entry_count() const {
  std::size_t n = 0;
  for (const PromptGroup& g : groups_) n += g.outputs.size();
  return n;
}

std::vector<const PromptGroup*> Museum::groups(Task task) const {
  std::vector<const PromptGroup*> out;
  for (const PromptGroup& g : groups_)
    if (g.task == task) out.push_back(&g);
  return out;
}

const PromptGroup* Museum::find_group(Task task, std::string_view prompt_id) const {
  for (const PromptGroup& g : groups_)
    if (g.task == task && g.prompt_id == prompt_id) return &g;
  return nullptr;
}

bool Museum::can_sample(Task task) const {
  return std::any_of(groups_.begin(), groups_.end(), [task](const PromptGroup& g) {
    return g.task == task && g.outputs.size() >= 2;
  });
}

SampledBattle Museum::sample_battle(Task task, PairingStrategy strategy,
                                    const PairHistory& history,
                                    std::uint64_t seed) const {
  std::vector<const PromptGroup*> eligible;
  for (const PromptGroup& g : groups_)
    if (g.task == task && g.outputs.size() >= 2) eligible.push_back(&g);
  if (eligible.empty())
    throw UnavailableError("no prompt with two or more outputs for task " +
                           std::string(to_string(task)));

  std::mt19937_64 rng(seed);
  const PromptGroup& group =
      *eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)];

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < group.outputs.size(); ++i)
    for (std::size_t j = i + 1; j < group.outputs.size(); ++j) pairs.emplace_back(i, j);

  if (strategy == PairingStrategy::kLeastBattledPair && history) {
    std::size_t fewest = std::numeric_limits<std::size_t>::max();
    std::vector<std::pair<std::size_t, std::size_t>> least;
    for (const auto& [i, j] : pairs) {
      const std::size_t n =
          history(group.prompt_id, group.outputs[i].model_id, group.outputs[j].model_id);
      if (n < fewest) {
        fewest = n;
        least.clear();
      }
      if (n == fewest) least.emplace_back(i, j);
    }
    pairs = std::move(least);
  }

  auto [first, second] =
      pairs[std::uniform_int_distribution<std::size_t>(0, pairs.size() - 1)(rng)];
  if (std::bernoulli_distribution(0.5)(rng)) std::swap(first, second);
  const MuseumEntry& a = group.outputs[first];
  const MuseumEntry& b = group.outputs[second];

  return SampledBattle{
      PublicBattle{task, group.prompt_id, group.prompt_text, group.source_image_uri,
                   group.media_type, a.artifact_uri, b.artifact_uri},
      SealedIdentities{a.model_id, b.model_id}};
}

}  // namespace arena::museum
