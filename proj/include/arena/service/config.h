#ifndef ARENA_SERVICE_CONFIG_H_
#define ARENA_SERVICE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "arena/museum/museum.h"
#include "arena/rating/types.h"
#include "arena/store/types.h"

namespace arena::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path museum_manifest;
  std::filesystem::path vote_log;  // empty: in-memory store
  std::optional<std::filesystem::path> safety_denylist;
  store::SafetyPolicy safety_policy = store::SafetyPolicy::kSafeOnly;
  museum::PairingStrategy pairing = museum::PairingStrategy::kLeastBattledPair;
  rating::RatingConfig rating;
  int bootstrap_rounds = 100;
  std::uint64_t seed = 0;
  std::int64_t battle_ttl_ms = 3'600'000;

  // ValidationError naming the offending field.
  void validate() const;
};

// Reads a JSON config file:
//
//   {
//     "listen": {"host": "127.0.0.1", "port": 8080},
//     "museum_manifest": "museum.jsonl",
//     "vote_log": "votes.jsonl",
//     "safety_denylist": "safety_denylist.json",
//     "safety_policy": "safe_only",
//     "pairing": "balanced",
//     "seed": 0,
//     "battle_ttl_seconds": 3600,
//     "rating": {"alpha": 400, "anchor": 1000, "k_factor": 32,
//                "bootstrap_rounds": 100, "bothbad": "tie"}
//   }
//
// Relative paths resolve against the file's directory. Unknown keys and
// ill-typed values raise ValidationError naming the field.
ServiceConfig load_config(const std::filesystem::path& path);
ServiceConfig parse_config(std::string_view json_text,
                           const std::filesystem::path& base_dir = {});

// Applies ARENA_HOST, ARENA_PORT, ARENA_MUSEUM_MANIFEST, ARENA_VOTE_LOG,
// ARENA_SAFETY_DENYLIST, ARENA_SAFETY_POLICY, ARENA_PAIRING, ARENA_SEED,
// ARENA_BOOTSTRAP_ROUNDS and ARENA_BOTHBAD when set.
using EnvLookup = std::function<std::optional<std::string>(const char* name)>;
void apply_env_overrides(ServiceConfig& config, const EnvLookup& env);
std::optional<std::string> process_env(const char* name);

}  // namespace arena::service

#endif  // ARENA_SERVICE_CONFIG_H_
