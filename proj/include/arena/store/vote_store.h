#ifndef ARENA_STORE_VOTE_STORE_H_
#define ARENA_STORE_VOTE_STORE_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "arena/store/types.h"

namespace arena::store {

// A counted vote joined with its battle and prompt.
struct VoteDetail {
  Vote vote;
  Battle battle;
  Prompt prompt;
};

// Append-only store of prompts, battles and votes.
//
// Every mutation is appended to a line-delimited JSON log (when the store
// is file backed) before the in-memory index changes. Battle state changes
// are appended as new battle records; the latest record for an id wins.
// Writers are serialized; readers see a consistent prefix.
class VoteStore {
 public:
  // In-memory store without a log file.
  VoteStore();
  ~VoteStore();

  VoteStore(const VoteStore&) = delete;
  VoteStore& operator=(const VoteStore&) = delete;

  // Replays `log_path` (created if missing) and appends new records to it.
  static std::unique_ptr<VoteStore> open(const std::filesystem::path& log_path);

  // Read-only view of a vote log or a bench export, held in memory.
  static std::unique_ptr<VoteStore> read(const std::filesystem::path& path);

  // Replays log lines from `in` into a fresh in-memory store. ParseError
  // names the offending line.
  static std::unique_ptr<VoteStore> replay(std::istream& in);

  // Adds or updates a prompt. Updates may only resolve safety; changing the
  // text or task of an existing id is a ConflictError.
  void add_prompt(const Prompt& prompt);
  std::optional<Prompt> prompt(const std::string& id) const;

  // Registers a new Open battle. The prompt must exist and the id must be
  // fresh (ConflictError otherwise).
  void create_battle(const Battle& battle);
  std::optional<Battle> battle(const std::string& id) const;

  // Marks the battle Revealed. Idempotent. NotFoundError on unknown ids.
  Battle reveal(const std::string& battle_id, TimestampMs at);

  // Stores the single vote of a battle. The vote is counted unless the
  // battle was revealed first. NotFoundError / ConflictError.
  Vote record_vote(const std::string& battle_id, rating::BattleOutcome outcome,
                   TimestampMs at);
  std::optional<Vote> vote(const std::string& battle_id) const;

  // Counted votes for `task`, ordered by (voted_at, battle id).
  std::vector<rating::BattleRecord> load_counted_votes(Task task,
                                                       SafetyPolicy policy) const;
  std::vector<VoteDetail> counted_votes(Task task, SafetyPolicy policy) const;

  // Counted votes dropped by the safety filter, keyed by unsafe category.
  // Votes on unchecked prompts are listed under "unchecked".
  std::map<std::string, std::size_t> filtered_category_histogram(Task task) const;

  // Counted votes on (task, prompt) between the unordered pair {a, b}.
  std::size_t pair_vote_count(Task task, const std::string& prompt_id,
                              const ModelId& a, const ModelId& b) const;
  std::size_t counted_vote_count(Task task) const;

  // Bumped by every successful mutation.
  std::uint64_t revision() const;

  // Writes the safe, counted votes of `task`: a metadata line
  // {task, exported_at, count} followed by one record per vote. exported_at
  // is the latest voted_at in the export (0 when empty), so unchanged data
  // re-exports byte-identically. Returns the record count.
  std::size_t export_bench(Task task, std::ostream& out) const;
  // Writes via a temporary file and rename; no partial file on failure.
  std::size_t export_bench(Task task, const std::filesystem::path& path) const;

  // Loads a bench export: prompts become Safe, battles Voted, votes counted.
  // Returns the number of votes imported.
  std::size_t import_bench(std::istream& in);

  // All battles created for `task`, in creation order.
  std::vector<Battle> battles(Task task) const;

  void flush();

 private:
  struct BattleIndex {
    Battle battle;
    std::vector<std::pair<BattleState, TimestampMs>> history;
  };

  void append(const std::string& line);
  void apply_line(const std::string& line, std::size_t line_number);
  void import_bench_locked(std::istream& in, const std::string& first_line);
  std::vector<VoteDetail> counted_votes_locked(Task task,
                                               SafetyPolicy policy) const;
  void add_prompt_locked(const Prompt& prompt, bool log);
  void create_battle_locked(const Battle& battle, TimestampMs at, bool log);
  void set_state_locked(BattleIndex& entry, BattleState state, TimestampMs at,
                        bool log);
  void add_vote_locked(const Vote& vote, bool log);

  mutable std::shared_mutex mutex_;
  std::unique_ptr<std::ofstream> log_;
  std::uint64_t revision_ = 0;
  std::unordered_map<std::string, Prompt> prompts_;
  std::unordered_map<std::string, BattleIndex> battles_;
  std::vector<std::string> battle_order_;
  std::unordered_map<std::string, Vote> votes_;
};

// True when the first line of a file looks like a bench export header.
bool is_bench_header(const std::string& line);

}  // namespace arena::store

#endif  // ARENA_STORE_VOTE_STORE_H_
