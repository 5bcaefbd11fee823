#include "arena/service/config.h"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "arena/errors.h"

namespace arena::service {
namespace {

using Json = nlohmann::json;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw ValidationError("config field '" + field + "': " + why);
}

void reject_unknown(const Json& obj, const std::string& prefix,
                    const std::set<std::string>& known) {
  for (const auto& [key, _] : obj.items())
    if (!known.count(key)) bad_field(prefix + key, "unknown key");
}

template <typename T>
T get_as(const Json& obj, const std::string& key, const std::string& field) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad_field(field, "has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

bool parse_bothbad(const std::string& v, rating::BothBadPolicy* out) {
  if (v == "tie") *out = rating::BothBadPolicy::kAsTie;
  else if (v == "discard") *out = rating::BothBadPolicy::kDiscard;
  else return false;
  return true;
}

}  // namespace

void ServiceConfig::validate() const {
  if (host.empty()) bad_field("listen.host", "must not be empty");
  if (port < 0 || port > 65535) bad_field("listen.port", "must be in [0, 65535]");
  if (museum_manifest.empty()) bad_field("museum_manifest", "is required");
  if (safety_policy == store::SafetyPolicy::kSafeOnly && !safety_denylist)
    bad_field("safety_denylist", "is required when safety_policy is safe_only");
  if (bootstrap_rounds < 1) bad_field("rating.bootstrap_rounds", "must be >= 1");
  if (battle_ttl_ms <= 0) bad_field("battle_ttl_seconds", "must be positive");
  if (!(rating.alpha > 0)) bad_field("rating.alpha", "must be positive");
  if (!(rating.k_factor > 0)) bad_field("rating.k_factor", "must be positive");
  try {
    rating.validate();
  } catch (const std::exception& e) {
    bad_field("rating", e.what());
  }
}

ServiceConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  Json root = Json::parse(json_text, nullptr, false);
  if (root.is_discarded() || !root.is_object())
    throw ValidationError("config is not a JSON object");
  reject_unknown(root, "",
                 {"listen", "museum_manifest", "vote_log", "safety_denylist",
                  "safety_policy", "pairing", "seed", "battle_ttl_seconds", "rating"});
  ServiceConfig c;
  if (root.contains("listen")) {
    const Json& l = root["listen"];
    if (!l.is_object()) bad_field("listen", "must be an object");
    reject_unknown(l, "listen.", {"host", "port"});
    if (l.contains("host")) c.host = get_as<std::string>(l, "host", "listen.host");
    if (l.contains("port")) c.port = get_as<int>(l, "port", "listen.port");
  }
  if (root.contains("museum_manifest"))
    c.museum_manifest =
        resolve(base_dir, get_as<std::string>(root, "museum_manifest", "museum_manifest"));
  if (root.contains("vote_log") && !root["vote_log"].is_null())
    c.vote_log = resolve(base_dir, get_as<std::string>(root, "vote_log", "vote_log"));
  if (root.contains("safety_denylist") && !root["safety_denylist"].is_null())
    c.safety_denylist =
        resolve(base_dir, get_as<std::string>(root, "safety_denylist", "safety_denylist"));
  if (root.contains("safety_policy")) {
    try {
      c.safety_policy = store::parse_safety_policy(
          get_as<std::string>(root, "safety_policy", "safety_policy"));
    } catch (const ValidationError& e) {
      bad_field("safety_policy", e.what());
    }
  }
  if (root.contains("pairing")) {
    try {
      c.pairing = museum::parse_pairing(get_as<std::string>(root, "pairing", "pairing"));
    } catch (const ValidationError& e) {
      bad_field("pairing", e.what());
    }
  }
  if (root.contains("seed")) c.seed = get_as<std::uint64_t>(root, "seed", "seed");
  if (root.contains("battle_ttl_seconds"))
    c.battle_ttl_ms = 1000 * get_as<std::int64_t>(root, "battle_ttl_seconds",
                                                  "battle_ttl_seconds");
  if (root.contains("rating")) {
    const Json& r = root["rating"];
    if (!r.is_object()) bad_field("rating", "must be an object");
    reject_unknown(r, "rating.", {"alpha", "anchor", "k_factor", "bootstrap_rounds",
                                  "bothbad", "convergence_tol", "max_iterations"});
    if (r.contains("alpha")) c.rating.alpha = get_as<double>(r, "alpha", "rating.alpha");
    if (r.contains("anchor")) c.rating.anchor = get_as<double>(r, "anchor", "rating.anchor");
    if (r.contains("k_factor"))
      c.rating.k_factor = get_as<double>(r, "k_factor", "rating.k_factor");
    if (r.contains("convergence_tol"))
      c.rating.convergence_tol =
          get_as<double>(r, "convergence_tol", "rating.convergence_tol");
    if (r.contains("max_iterations"))
      c.rating.max_iterations = get_as<int>(r, "max_iterations", "rating.max_iterations");
    if (r.contains("bootstrap_rounds"))
      c.bootstrap_rounds = get_as<int>(r, "bootstrap_rounds", "rating.bootstrap_rounds");
    if (r.contains("bothbad") &&
        !parse_bothbad(get_as<std::string>(r, "bothbad", "rating.bothbad"),
                       &c.rating.bothbad_policy))
      bad_field("rating.bothbad", "must be \"tie\" or \"discard\"");
  }
  return c;
}

ServiceConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

void apply_env_overrides(ServiceConfig& c, const EnvLookup& env) {
  auto number = [](const std::string& field, const std::string& v) {
    try {
      std::size_t used = 0;
      const long long n = std::stoll(v, &used);
      if (used == v.size()) return n;
    } catch (const std::exception&) {
    }
    bad_field(field, "'" + v + "' is not an integer");
  };
  if (auto v = env("ARENA_HOST")) c.host = *v;
  if (auto v = env("ARENA_PORT")) c.port = static_cast<int>(number("ARENA_PORT", *v));
  if (auto v = env("ARENA_MUSEUM_MANIFEST")) c.museum_manifest = *v;
  if (auto v = env("ARENA_VOTE_LOG")) c.vote_log = *v;
  if (auto v = env("ARENA_SAFETY_DENYLIST")) c.safety_denylist = *v;
  if (auto v = env("ARENA_SAFETY_POLICY")) {
    try {
      c.safety_policy = store::parse_safety_policy(*v);
    } catch (const ValidationError& e) {
      bad_field("ARENA_SAFETY_POLICY", e.what());
    }
  }
  if (auto v = env("ARENA_PAIRING")) {
    try {
      c.pairing = museum::parse_pairing(*v);
    } catch (const ValidationError& e) {
      bad_field("ARENA_PAIRING", e.what());
    }
  }
  if (auto v = env("ARENA_SEED"))
    c.seed = static_cast<std::uint64_t>(number("ARENA_SEED", *v));
  if (auto v = env("ARENA_BOOTSTRAP_ROUNDS"))
    c.bootstrap_rounds = static_cast<int>(number("ARENA_BOOTSTRAP_ROUNDS", *v));
  if (auto v = env("ARENA_BOTHBAD"); v && !parse_bothbad(*v, &c.rating.bothbad_policy))
    bad_field("ARENA_BOTHBAD", "must be \"tie\" or \"discard\"");
}

std::optional<std::string> process_env(const char* name) {
  if (const char* v = std::getenv(name)) return std::string(v);
  return std::nullopt;
}

}  // namespace arena::service
