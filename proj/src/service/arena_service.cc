#include "arena/service/arena_service.h"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>

#include "arena/errors.h"
#include "arena/rating/analysis.h"
#include "arena/rating/bootstrap.h"
#include "arena/rating/bradley_terry.h"

namespace arena::service {
namespace {

using rating::BattleOutcome;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct WrongMethod {
  std::string allowed;
};

Json optional_string(const std::optional<std::string>& s) {
  return s ? Json(*s) : Json(nullptr);
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json matrix_json(const rating::ModelMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(optional_number(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const auto next = path.find('/', pos);
    const auto end = next == std::string_view::npos ? path.size() : next;
    if (end > pos) parts.emplace_back(path.substr(pos, end - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

Json parse_body(std::string_view body) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return Json::object();
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ValidationError("request body must be a JSON object");
  return j;
}

std::string required_string(const Json& body, const char* key) {
  if (!body.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  if (!body[key].is_string())
    throw ValidationError(std::string("field '") + key + "' must be a string");
  return body[key].get<std::string>();
}

}  // namespace

ApiResponse error_response(std::string_view code, std::string_view message) {
  static const std::map<std::string_view, int> kStatus = {
      {"bad_request", 400}, {"not_found", 404}, {"method_not_allowed", 405},
      {"conflict", 409},    {"expired", 410},   {"internal", 500},
      {"unavailable", 503}};
  auto it = kStatus.find(code);
  ApiResponse r;
  r.status = it == kStatus.end() ? 500 : it->second;
  r.body = Json{{"error", Json{{"code", code}, {"message", message}}}};
  return r;
}

ArenaService::ArenaService(ServiceConfig config, museum::Museum museum,
                           std::unique_ptr<store::VoteStore> store,
                           std::shared_ptr<const store::SafetyFilter> filter, Clock clock)
    : config_(std::move(config)),
      museum_(std::move(museum)),
      store_(std::move(store)),
      filter_(std::move(filter)),
      clock_(std::move(clock)) {
  std::map<std::string, Task> prompt_tasks;
  for (Task t : kAllTasks)
    for (const auto* g : museum_.groups(t)) {
      auto [it, fresh] = prompt_tasks.emplace(g->prompt_id, t);
      if (!fresh)
        throw ValidationError("museum prompt id '" + g->prompt_id +
                              "' is used by more than one task");
    }
}

ArenaService::Clock ArenaService::system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

std::unique_ptr<ArenaService> ArenaService::from_config(const ServiceConfig& config,
                                                        Clock clock) {
  config.validate();
  auto museum = museum::Museum::ingest_file(config.museum_manifest);
  std::shared_ptr<const store::SafetyFilter> filter;
  if (config.safety_denylist)
    filter = std::make_shared<store::DenylistFilter>(
        store::DenylistFilter::from_file(*config.safety_denylist));
  auto store = config.vote_log.empty() ? std::make_unique<store::VoteStore>()
                                       : store::VoteStore::open(config.vote_log);
  return std::make_unique<ArenaService>(config, std::move(museum), std::move(store),
                                        std::move(filter), std::move(clock));
}

void ArenaService::ensure_prompt(const museum::PublicBattle& visible) {
  const auto existing = store_->prompt(visible.prompt_id);
  if (existing && existing->safety.status != store::Safety::Status::kUnchecked) return;
  store::Prompt prompt{visible.prompt_id, visible.task, visible.prompt_text,
                       visible.source_image_uri, store::Safety::unchecked()};
  if (filter_) {
    try {
      prompt = store::moderate_prompt(prompt, *filter_);
    } catch (const store::SafetyFilterError& e) {
      std::clog << "warning: safety filter failed for prompt " << prompt.id << ": "
                << e.what() << "; stored as unchecked\n";
    }
  }
  if (!existing || prompt.safety.status != store::Safety::Status::kUnchecked)
    store_->add_prompt(prompt);
}

Json ArenaService::sample(Task task, std::optional<museum::PairingStrategy> strategy) {
  std::lock_guard lock(sample_mutex_);
  if (!museum_.can_sample(task))
    throw UnavailableError("no museum content to sample for " + std::string(to_string(task)));

  // The draw depends on the server seed and on how many battles this task
  // has already produced, so a given store state always yields the same
  // battle content.
  const std::uint64_t sequence = store_->battles(task).size();
  const std::uint64_t seed =
      splitmix64(config_.seed ^ splitmix64(static_cast<std::uint64_t>(task) + 1) ^
                 splitmix64(sequence + 0x51ed));
  const museum::PairHistory history = [&](std::string_view prompt_id, const ModelId& a,
                                          const ModelId& b) {
    return store_->pair_vote_count(task, std::string(prompt_id), a, b);
  };
  const auto sampled =
      museum_.sample_battle(task, strategy.value_or(config_.pairing), history, seed);
  ensure_prompt(sampled.visible);

  std::size_t total = 0;
  for (Task t : kAllTasks) total += store_->battles(t).size();
  static thread_local std::mt19937_64 suffix_rng{std::random_device{}()};
  char id[40];
  std::snprintf(id, sizeof id, "b%08zu-%08llx", total + 1,
                static_cast<unsigned long long>(suffix_rng() & 0xffffffffULL));

  const TimestampMs now = clock_();
  store_->create_battle({id, task, sampled.visible.prompt_id, sampled.sealed.model_a,
                         sampled.sealed.model_b, sampled.visible.output_a_uri,
                         sampled.visible.output_b_uri, store::BattleState::kOpen, now});
  Json out;
  out["battle_id"] = id;
  out["task"] = to_string(task);
  out["prompt_id"] = sampled.visible.prompt_id;
  out["prompt"] = sampled.visible.prompt_text;
  out["source_image_uri"] = optional_string(sampled.visible.source_image_uri);
  out["media_type"] = museum::to_string(sampled.visible.media_type);
  out["output_a_uri"] = sampled.visible.output_a_uri;
  out["output_b_uri"] = sampled.visible.output_b_uri;
  out["expires_at"] = now + config_.battle_ttl_ms;
  return out;
}

Json ArenaService::vote(const std::string& battle_id, std::string_view outcome_name) {
  const auto outcome = rating::parse_outcome(outcome_name);
  if (!outcome)
    throw ValidationError("outcome must be one of leftvote, rightvote, tievote, bothbad_vote");
  const auto battle = store_->battle(battle_id);
  if (!battle) throw NotFoundError("unknown battle '" + battle_id + "'");
  if (store_->vote(battle_id)) throw ConflictError("battle '" + battle_id + "' already voted");
  const TimestampMs now = clock_();
  if (now > battle->created_at + config_.battle_ttl_ms)
    throw ExpiredError("battle '" + battle_id + "' expired");
  const auto v = store_->record_vote(battle_id, *outcome, now);
  Json out;
  out["battle_id"] = battle_id;
  out["outcome"] = rating::to_string(v.outcome);
  out["counted"] = v.counted;
  out["reveal"] = Json{{"model_a", battle->model_a}, {"model_b", battle->model_b}};
  return out;
}

Json ArenaService::reveal(const std::string& battle_id) {
  const auto b = store_->reveal(battle_id, clock_());
  Json out;
  out["battle_id"] = battle_id;
  out["model_a"] = b.model_a;
  out["model_b"] = b.model_b;
  return out;
}

std::vector<rating::BattleRecord> ArenaService::counted(Task task) const {
  return store_->load_counted_votes(task, config_.safety_policy);
}

std::vector<ModelId> ArenaService::rating_order(
    const std::vector<rating::BattleRecord>& battles) const {
  std::set<ModelId> models;
  for (const auto& b : battles) {
    models.insert(b.model_a);
    models.insert(b.model_b);
  }
  if (models.size() < 2) return {models.begin(), models.end()};
  return rating::fit_battles(battles, config_.rating).ranked_models();
}

Json ArenaService::leaderboard(Task task) {
  auto battles = counted(task);
  {
    std::lock_guard lock(cache_mutex_);
    auto it = board_cache_.find(task);
    if (it != board_cache_.end() && it->second.input == battles) return it->second.body;
  }

  std::set<ModelId> models;
  for (const auto& b : battles) {
    models.insert(b.model_a);
    models.insert(b.model_b);
  }
  Json out;
  out["task"] = to_string(task);
  out["vote_count"] = battles.size();
  out["bootstrap_rounds"] = config_.bootstrap_rounds;
  out["seed"] = config_.seed;
  Json entries = Json::array();
  if (models.size() < 2) {
    out["status"] = "insufficient_data";
    out["message"] = "a leaderboard needs counted votes covering at least two models";
    out["components"] = 0;
  } else {
    const auto table = rating::bootstrap_confidence_interval(
        battles, config_.bootstrap_rounds, config_.seed, config_.rating);
    out["status"] = "ok";
    out["message"] = "";
    out["components"] = table.components;
    for (const auto& m : table.ranked_models()) {
      const auto& e = table.at(m);
      entries.push_back(Json{{"model", m},
                             {"rating", e.rating},
                             {"ci_lower", optional_number(e.ci_lower)},
                             {"ci_upper", optional_number(e.ci_upper)},
                             {"battles", e.battle_count}});
    }
  }
  out["leaderboard"] = std::move(entries);

  std::lock_guard lock(cache_mutex_);
  board_cache_[task] = {std::move(battles), out};
  return out;
}

Json ArenaService::stats(Task task, std::string_view matrix, bool include_ties) {
  if (matrix != "win_fraction" && matrix != "battle_count" && matrix != "average_win_rate")
    throw ValidationError("unknown matrix '" + std::string(matrix) +
                          "' (expected win_fraction, battle_count or average_win_rate)");
  const auto battles = counted(task);
  const auto order = rating_order(battles);
  Json out;
  out["task"] = to_string(task);
  out["matrix"] = matrix;
  out["models"] = order;
  if (matrix == "win_fraction") {
    out["values"] = matrix_json(rating::win_fraction_matrix(battles).reordered(order));
  } else if (matrix == "battle_count") {
    out["include_ties"] = include_ties;
    out["values"] =
        matrix_json(rating::battle_count_matrix(battles, include_ties).reordered(order));
  } else {
    Json values = Json::array();
    if (order.size() >= 2) {
      const auto rates = rating::average_win_rate(
          rating::fit_battles(battles, config_.rating), config_.rating.alpha);
      for (const auto& m : order) values.push_back(rates.at(m));
    }
    out["values"] = std::move(values);
  }
  return out;
}

Json ArenaService::museum_listing(Task task) const {
  Json prompts = Json::array();
  for (const auto* g : museum_.groups(task)) {
    Json outputs = Json::array();
    for (const auto& e : g->outputs)
      outputs.push_back(Json{{"model_id", e.model_id}, {"artifact_uri", e.artifact_uri}});
    prompts.push_back(Json{{"prompt_id", g->prompt_id},
                           {"prompt", g->prompt_text},
                           {"source_image_uri", optional_string(g->source_image_uri)},
                           {"media_type", museum::to_string(g->media_type)},
                           {"outputs", std::move(outputs)}});
  }
  return Json{{"task", to_string(task)}, {"prompts", std::move(prompts)}};
}

Json ArenaService::health() const {
  Json tasks = Json::object();
  for (Task t : kAllTasks)
    tasks[std::string(to_string(t))] =
        Json{{"museum_prompts", museum_.groups(t).size()},
             {"counted_votes", store_->counted_vote_count(t)}};
  return Json{{"status", "ok"}, {"tasks", std::move(tasks)}};
}

ApiResponse ArenaService::handle(std::string_view method, std::string_view path,
                                 const std::map<std::string, std::string>& query,
                                 std::string_view body) {
  try {
    const auto p = split_path(path);
    if (p.empty() || p[0] != "v1") return error_response("not_found", "no such endpoint");
    auto expect = [&](std::string_view m) {
      if (method != m) throw WrongMethod{std::string(m)};
    };
    try {
      if (p.size() == 2 && p[1] == "health") {
        expect("GET");
        return {200, health()};
      }
      if (p.size() == 3 && p[1] == "battles" && p[2] == "sample") {
        expect("POST");
        const Json req = parse_body(body);
        const Task task = parse_task(required_string(req, "task"));
        std::optional<museum::PairingStrategy> strategy;
        if (req.contains("strategy") && !req["strategy"].is_null())
          strategy = museum::parse_pairing(required_string(req, "strategy"));
        return {200, sample(task, strategy)};
      }
      if (p.size() == 4 && p[1] == "battles" && p[3] == "vote") {
        expect("POST");
        const Json req = parse_body(body);
        return {200, vote(p[2], required_string(req, "outcome"))};
      }
      if (p.size() == 4 && p[1] == "battles" && p[3] == "reveal") {
        expect("POST");
        return {200, reveal(p[2])};
      }
      if (p.size() == 3 && p[1] == "leaderboard") {
        expect("GET");
        return {200, leaderboard(parse_task(p[2]))};
      }
      if (p.size() == 4 && p[1] == "stats") {
        expect("GET");
        bool ties = false;
        if (auto it = query.find("include_ties"); it != query.end()) {
          if (it->second == "true" || it->second == "1") ties = true;
          else if (it->second != "false" && it->second != "0")
            throw ValidationError("include_ties must be true or false");
        }
        return {200, stats(parse_task(p[2]), p[3], ties)};
      }
      if (p.size() == 3 && p[1] == "museum") {
        expect("GET");
        return {200, museum_listing(parse_task(p[2]))};
      }
    } catch (const WrongMethod& e) {
      return error_response("method_not_allowed",
                            "use " + e.allowed + " for " + std::string(path));
    }
    return error_response("not_found", "no such endpoint: " + std::string(path));
  } catch (const ValidationError& e) {
    return error_response("bad_request", e.what());
  } catch (const ParseError& e) {
    return error_response("bad_request", e.what());
  } catch (const NotFoundError& e) {
    return error_response("not_found", e.what());
  } catch (const ConflictError& e) {
    return error_response("conflict", e.what());
  } catch (const ExpiredError& e) {
    return error_response("expired", e.what());
  } catch (const UnavailableError& e) {
    return error_response("unavailable", e.what());
  } catch (const std::exception& e) {
    std::clog << "error: " << method << ' ' << path << ": " << e.what() << '\n';
    return error_response("internal", e.what());
  }
}

}  // namespace arena::service
