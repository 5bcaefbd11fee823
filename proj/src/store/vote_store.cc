#include "arena/store/vote_store.h"

#include <algorithm>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "arena/errors.h"

namespace arena::store {
namespace {

using Json = nlohmann::ordered_json;
using rating::BattleOutcome;

std::string pair_key(Task task, const std::string& prompt_id, const ModelId& a,
                     const ModelId& b) {
  const auto& [lo, hi] = std::minmax(a, b);
  std::string key(to_string(task));
  key += '\x1f';
  key += prompt_id;
  key += '\x1f';
  key += lo;
  key += '\x1f';
  key += hi;
  return key;
}

std::string dump(const Json& record) {
  try {
    return record.dump();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("record is not valid UTF-8: ") + e.what());
  }
}

Json prompt_record(const Prompt& p) {
  Json j;
  j["record_type"] = "prompt";
  j["id"] = p.id;
  j["task"] = to_string(p.task);
  j["text"] = p.text;
  j["source_image_ref"] = p.source_image_ref ? Json(*p.source_image_ref) : Json();
  j["safety"] = to_string(p.safety.status);
  if (p.safety.status == Safety::Status::kUnsafe)
    j["safety_category"] = p.safety.category;
  return j;
}

Json battle_record(const Battle& b, TimestampMs at) {
  Json j;
  j["record_type"] = "battle";
  j["id"] = b.id;
  j["task"] = to_string(b.task);
  j["prompt_id"] = b.prompt_id;
  j["model_a"] = b.model_a;
  j["model_b"] = b.model_b;
  j["output_a"] = b.output_a;
  j["output_b"] = b.output_b;
  j["state"] = to_string(b.state);
  j["created_at"] = b.created_at;
  j["at"] = at;
  return j;
}

Json vote_record(const Vote& v) {
  Json j;
  j["record_type"] = "vote";
  j["battle_id"] = v.battle_id;
  j["outcome"] = to_string(v.outcome);
  j["voted_at"] = v.voted_at;
  j["counted"] = v.counted;
  return j;
}

BattleOutcome outcome_field(const Json& j, const char* key) {
  const auto name = j.at(key).get<std::string>();
  if (auto outcome = rating::parse_outcome(name)) return *outcome;
  throw ValidationError("unknown outcome '" + name + "'");
}

Prompt parse_prompt(const Json& j) {
  Prompt p;
  p.id = j.at("id").get<std::string>();
  p.task = parse_task(j.at("task").get<std::string>());
  p.text = j.at("text").get<std::string>();
  if (j.contains("source_image_ref") && !j["source_image_ref"].is_null())
    p.source_image_ref = j["source_image_ref"].get<std::string>();
  p.safety.status = parse_safety_status(j.at("safety").get<std::string>());
  if (p.safety.status == Safety::Status::kUnsafe)
    p.safety.category = j.value("safety_category", std::string());
  return p;
}

Battle parse_battle(const Json& j) {
  Battle b;
  b.id = j.at("id").get<std::string>();
  b.task = parse_task(j.at("task").get<std::string>());
  b.prompt_id = j.at("prompt_id").get<std::string>();
  b.model_a = j.at("model_a").get<std::string>();
  b.model_b = j.at("model_b").get<std::string>();
  b.output_a = j.at("output_a").get<std::string>();
  b.output_b = j.at("output_b").get<std::string>();
  b.state = parse_battle_state(j.at("state").get<std::string>());
  b.created_at = j.at("created_at").get<TimestampMs>();
  return b;
}

bool legal_transition(BattleState from, BattleState to) {
  if (from == to) return true;
  return (from == BattleState::kOpen &&
          (to == BattleState::kVoted || to == BattleState::kRevealed)) ||
         (from == BattleState::kVoted && to == BattleState::kRevealed);
}

}  // namespace

bool is_bench_header(const std::string& line) {
  try {
    const Json j = Json::parse(line);
    return j.is_object() && !j.contains("record_type") && j.contains("count") &&
           j.contains("task");
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

VoteStore::VoteStore() = default;
VoteStore::~VoteStore() = default;

std::unique_ptr<VoteStore> VoteStore::replay(std::istream& in) {
  auto store = std::make_unique<VoteStore>();
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    store->apply_line(line, number);
  }
  return store;
}

std::unique_ptr<VoteStore> VoteStore::open(const std::filesystem::path& log_path) {
  std::unique_ptr<VoteStore> store;
  if (std::filesystem::exists(log_path)) {
    std::ifstream in(log_path);
    if (!in) throw ValidationError("cannot read vote log " + log_path.string());
    store = replay(in);
  } else {
    store = std::make_unique<VoteStore>();
    std::error_code ec;
    if (log_path.has_parent_path()) std::filesystem::create_directories(log_path.parent_path(), ec);
  }
  store->log_ = std::make_unique<std::ofstream>(log_path, std::ios::app);
  if (!*store->log_)
    throw ValidationError("cannot open vote log " + log_path.string() +
                          " for appending");
  return store;
}

std::unique_ptr<VoteStore> VoteStore::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::string first;
  std::streampos start = in.tellg();
  while (std::getline(in, first)) {
    if (first.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  if (is_bench_header(first)) {
    auto store = std::make_unique<VoteStore>();
    std::unique_lock lock(store->mutex_);
    store->import_bench_locked(in, first);
    return store;
  }
  in.clear();
  in.seekg(start);
  return replay(in);
}

void VoteStore::append(const std::string& line) {
  ++revision_;
  if (!log_) return;
  *log_ << line << '\n';
  log_->flush();
  if (!*log_) throw std::runtime_error("failed to append to vote log");
}

void VoteStore::flush() {
  std::unique_lock lock(mutex_);
  if (log_) log_->flush();
}

std::uint64_t VoteStore::revision() const {
  std::shared_lock lock(mutex_);
  return revision_;
}

void VoteStore::apply_line(const std::string& line, std::size_t line_number) {
  try {
    const Json j = Json::parse(line);
    const std::string type = j.at("record_type").get<std::string>();
    if (type == "prompt") {
      add_prompt_locked(parse_prompt(j), false);
    } else if (type == "battle") {
      Battle b = parse_battle(j);
      const TimestampMs at = j.value("at", b.created_at);
      auto it = battles_.find(b.id);
      if (it == battles_.end()) {
        if (b.state != BattleState::kOpen)
          throw ValidationError("battle '" + b.id + "' first seen in state " +
                                std::string(to_string(b.state)));
        create_battle_locked(b, at, false);
      } else {
        set_state_locked(it->second, b.state, at, false);
      }
    } else if (type == "vote") {
      Vote v;
      v.battle_id = j.at("battle_id").get<std::string>();
      v.outcome = outcome_field(j, "outcome");
      v.voted_at = j.at("voted_at").get<TimestampMs>();
      v.counted = j.at("counted").get<bool>();
      add_vote_locked(v, false);
    } else {
      throw ValidationError("unknown record_type '" + type + "'");
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(e.what(), line_number, line);
  }
}

void VoteStore::add_prompt(const Prompt& prompt) {
  std::unique_lock lock(mutex_);
  add_prompt_locked(prompt, true);
}

void VoteStore::add_prompt_locked(const Prompt& prompt, bool log) {
  prompt.validate();
  auto it = prompts_.find(prompt.id);
  if (it != prompts_.end()) {
    const Prompt& old = it->second;
    if (old.task != prompt.task || old.text != prompt.text ||
        old.source_image_ref != prompt.source_image_ref)
      throw ConflictError("prompt '" + prompt.id + "' already exists with different content");
    if (old.safety == prompt.safety) return;
  }
  if (log) append(dump(prompt_record(prompt)));
  else ++revision_;
  prompts_[prompt.id] = prompt;
}

std::optional<Prompt> VoteStore::prompt(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = prompts_.find(id);
  if (it == prompts_.end()) return std::nullopt;
  return it->second;
}

void VoteStore::create_battle(const Battle& battle) {
  std::unique_lock lock(mutex_);
  if (battle.state != BattleState::kOpen)
    throw ValidationError("new battles must be open");
  create_battle_locked(battle, battle.created_at, true);
}

void VoteStore::create_battle_locked(const Battle& battle, TimestampMs at,
                                     bool log) {
  if (battle.id.empty()) throw ValidationError("battle id must not be empty");
  if (battle.model_a == battle.model_b)
    throw ValidationError("battle '" + battle.id + "' pits a model against itself");
  if (battles_.count(battle.id))
    throw ConflictError("battle '" + battle.id + "' already exists");
  auto prompt = prompts_.find(battle.prompt_id);
  if (prompt == prompts_.end())
    throw NotFoundError("battle '" + battle.id + "' references unknown prompt '" +
                        battle.prompt_id + "'");
  if (prompt->second.task != battle.task)
    throw ValidationError("battle '" + battle.id + "' task differs from its prompt");
  if (log) append(dump(battle_record(battle, at)));
  else ++revision_;
  battles_[battle.id] = BattleIndex{battle, {{BattleState::kOpen, at}}};
  battle_order_.push_back(battle.id);
}

std::optional<Battle> VoteStore::battle(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = battles_.find(id);
  if (it == battles_.end()) return std::nullopt;
  return it->second.battle;
}

std::vector<Battle> VoteStore::battles(Task task) const {
  std::shared_lock lock(mutex_);
  std::vector<Battle> out;
  for (const std::string& id : battle_order_) {
    const Battle& b = battles_.at(id).battle;
    if (b.task == task) out.push_back(b);
  }
  return out;
}

void VoteStore::set_state_locked(BattleIndex& entry, BattleState state,
                                 TimestampMs at, bool log) {
  Battle& b = entry.battle;
  if (b.state == state) return;
  if (!legal_transition(b.state, state))
    throw ConflictError("battle '" + b.id + "' cannot move from " +
                        std::string(to_string(b.state)) + " to " +
                        std::string(to_string(state)));
  Battle next = b;
  next.state = state;
  if (log) append(dump(battle_record(next, at)));
  else ++revision_;
  b.state = state;
  entry.history.emplace_back(state, at);
}

Battle VoteStore::reveal(const std::string& battle_id, TimestampMs at) {
  std::unique_lock lock(mutex_);
  auto it = battles_.find(battle_id);
  if (it == battles_.end()) throw NotFoundError("unknown battle '" + battle_id + "'");
  set_state_locked(it->second, BattleState::kRevealed, at, true);
  return it->second.battle;
}

Vote VoteStore::record_vote(const std::string& battle_id, BattleOutcome outcome,
                            TimestampMs at) {
  std::unique_lock lock(mutex_);
  auto it = battles_.find(battle_id);
  if (it == battles_.end()) throw NotFoundError("unknown battle '" + battle_id + "'");
  Vote v{battle_id, outcome, at, it->second.battle.state != BattleState::kRevealed};
  add_vote_locked(v, true);
  return v;
}

void VoteStore::add_vote_locked(const Vote& vote, bool log) {
  auto it = battles_.find(vote.battle_id);
  if (it == battles_.end())
    throw NotFoundError("vote for unknown battle '" + vote.battle_id + "'");
  if (votes_.count(vote.battle_id))
    throw ConflictError("battle '" + vote.battle_id + "' already has a vote");
  BattleIndex& entry = it->second;
  const bool revealed = entry.battle.state == BattleState::kRevealed;
  if (vote.counted == revealed)
    throw ValidationError("vote on battle '" + vote.battle_id +
                          "' has counted=" + (vote.counted ? "true" : "false") +
                          " but the battle is " +
                          std::string(to_string(entry.battle.state)));
  if (log) append(dump(vote_record(vote)));
  else ++revision_;
  votes_[vote.battle_id] = vote;
  if (vote.counted) set_state_locked(entry, BattleState::kVoted, vote.voted_at, log);
}

std::optional<Vote> VoteStore::vote(const std::string& battle_id) const {
  std::shared_lock lock(mutex_);
  auto it = votes_.find(battle_id);
  if (it == votes_.end()) return std::nullopt;
  return it->second;
}

std::vector<VoteDetail> VoteStore::counted_votes_locked(Task task,
                                                        SafetyPolicy policy) const {
  std::vector<VoteDetail> out;
  for (const auto& [id, vote] : votes_) {
    if (!vote.counted) continue;
    const Battle& b = battles_.at(id).battle;
    if (b.task != task) continue;
    const Prompt& p = prompts_.at(b.prompt_id);
    if (policy == SafetyPolicy::kSafeOnly && !p.safety.is_safe()) continue;
    out.push_back({vote, b, p});
  }
  std::sort(out.begin(), out.end(), [](const VoteDetail& x, const VoteDetail& y) {
    return std::tie(x.vote.voted_at, x.vote.battle_id) <
           std::tie(y.vote.voted_at, y.vote.battle_id);
  });
  return out;
}

std::vector<VoteDetail> VoteStore::counted_votes(Task task,
                                                 SafetyPolicy policy) const {
  std::shared_lock lock(mutex_);
  return counted_votes_locked(task, policy);
}

std::vector<rating::BattleRecord> VoteStore::load_counted_votes(
    Task task, SafetyPolicy policy) const {
  std::vector<rating::BattleRecord> out;
  for (const VoteDetail& d : counted_votes(task, policy))
    out.push_back({d.battle.model_a, d.battle.model_b, d.vote.outcome, 1.0});
  return out;
}

std::map<std::string, std::size_t> VoteStore::filtered_category_histogram(
    Task task) const {
  std::map<std::string, std::size_t> out;
  for (const VoteDetail& d : counted_votes(task, SafetyPolicy::kAll)) {
    switch (d.prompt.safety.status) {
      case Safety::Status::kSafe:
        break;
      case Safety::Status::kUnsafe:
        ++out[d.prompt.safety.category];
        break;
      case Safety::Status::kUnchecked:
        ++out["unchecked"];
        break;
    }
  }
  return out;
}

std::size_t VoteStore::pair_vote_count(Task task, const std::string& prompt_id,
                                       const ModelId& a, const ModelId& b) const {
  std::shared_lock lock(mutex_);
  const std::string key = pair_key(task, prompt_id, a, b);
  std::size_t n = 0;
  for (const auto& [id, vote] : votes_) {
    if (!vote.counted) continue;
    const Battle& battle = battles_.at(id).battle;
    if (pair_key(battle.task, battle.prompt_id, battle.model_a, battle.model_b) == key)
      ++n;
  }
  return n;
}

std::size_t VoteStore::counted_vote_count(Task task) const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto& [id, vote] : votes_)
    if (vote.counted && battles_.at(id).battle.task == task) ++n;
  return n;
}

std::size_t VoteStore::export_bench(Task task, std::ostream& out) const {
  const std::vector<VoteDetail> votes = counted_votes(task, SafetyPolicy::kSafeOnly);
  Json meta;
  meta["task"] = to_string(task);
  meta["exported_at"] = votes.empty() ? TimestampMs{0} : votes.back().vote.voted_at;
  meta["count"] = votes.size();
  out << dump(meta) << '\n';
  for (const VoteDetail& d : votes) {
    Json j;
    j["battle_id"] = d.battle.id;
    j["task"] = to_string(task);
    j["prompt_id"] = d.prompt.id;
    j["prompt"] = d.prompt.text;
    if (d.prompt.source_image_ref) j["source_image_ref"] = *d.prompt.source_image_ref;
    j["model_a"] = d.battle.model_a;
    j["model_b"] = d.battle.model_b;
    j["output_a"] = d.battle.output_a;
    j["output_b"] = d.battle.output_b;
    j["outcome"] = to_string(d.vote.outcome);
    j["voted_at"] = d.vote.voted_at;
    out << dump(j) << '\n';
  }
  return votes.size();
}

std::size_t VoteStore::export_bench(Task task,
                                    const std::filesystem::path& path) const {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  std::size_t count = 0;
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    count = export_bench(task, out);
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
  return count;
}

std::size_t VoteStore::import_bench(std::istream& in) {
  std::string first;
  while (std::getline(in, first)) {
    if (first.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  if (!is_bench_header(first)) throw ParseError("missing bench metadata line", 1, first);
  std::unique_lock lock(mutex_);
  const std::size_t before = votes_.size();
  import_bench_locked(in, first);
  return votes_.size() - before;
}

void VoteStore::import_bench_locked(std::istream& in, const std::string& first_line) {
  const Json meta = Json::parse(first_line);
  const Task task = parse_task(meta.at("task").get<std::string>());
  const auto expected = meta.at("count").get<std::size_t>();
  std::string line;
  std::size_t number = 1, imported = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      Prompt p;
      p.id = j.at("prompt_id").get<std::string>();
      p.task = parse_task(j.value("task", std::string(to_string(task))));
      p.text = j.at("prompt").get<std::string>();
      if (j.contains("source_image_ref"))
        p.source_image_ref = j["source_image_ref"].get<std::string>();
      p.safety = Safety::safe();
      add_prompt_locked(p, true);

      Battle b;
      b.id = j.at("battle_id").get<std::string>();
      b.task = p.task;
      b.prompt_id = p.id;
      b.model_a = j.at("model_a").get<std::string>();
      b.model_b = j.at("model_b").get<std::string>();
      b.output_a = j.value("output_a", std::string());
      b.output_b = j.value("output_b", std::string());
      const auto voted_at = j.value("voted_at", TimestampMs{0});
      b.created_at = voted_at;
      create_battle_locked(b, voted_at, true);
      add_vote_locked({b.id, outcome_field(j, "outcome"), voted_at, true}, true);
      ++imported;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(e.what(), number, line);
    }
  }
  if (imported != expected)
    throw ParseError("bench header announces " + std::to_string(expected) +
                     " records but " + std::to_string(imported) + " were read");
}

}  // namespace arena::store
