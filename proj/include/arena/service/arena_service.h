#ifndef ARENA_SERVICE_ARENA_SERVICE_H_
#define ARENA_SERVICE_ARENA_SERVICE_H_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "arena/museum/museum.h"
#include "arena/rating/types.h"
#include "arena/service/config.h"
#include "arena/store/safety_filter.h"
#include "arena/store/vote_store.h"

namespace arena::service {

using Json = nlohmann::ordered_json;

// A vote arrived after the battle's expiry time.
class ExpiredError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ApiResponse {
  int status = 200;
  Json body;
};

// Stable error codes and their HTTP statuses:
//   bad_request 400, not_found 404, conflict 409, expired 410,
//   internal 500, unavailable 503.
ApiResponse error_response(std::string_view code, std::string_view message);

// Transport-independent arena API. All methods may be called concurrently.
class ArenaService {
 public:
  using Clock = std::function<TimestampMs()>;

  ArenaService(ServiceConfig config, museum::Museum museum,
               std::unique_ptr<store::VoteStore> store,
               std::shared_ptr<const store::SafetyFilter> filter, Clock clock);

  // Ingests the manifest, opens the vote log and loads the denylist.
  static std::unique_ptr<ArenaService> from_config(const ServiceConfig& config,
                                                   Clock clock = system_clock());
  static Clock system_clock();

  // POST /v1/battles/sample
  Json sample(Task task, std::optional<museum::PairingStrategy> strategy);
  // POST /v1/battles/{id}/vote. `outcome` is a wire name (leftvote, ...).
  Json vote(const std::string& battle_id, std::string_view outcome);
  // POST /v1/battles/{id}/reveal
  Json reveal(const std::string& battle_id);
  // GET /v1/leaderboard/{task}
  Json leaderboard(Task task);
  // GET /v1/stats/{task}/{win_fraction|battle_count|average_win_rate}
  Json stats(Task task, std::string_view matrix, bool include_ties);
  // GET /v1/museum/{task}
  Json museum_listing(Task task) const;
  // GET /v1/health
  Json health() const;

  // Routes a request and maps exceptions onto structured errors.
  ApiResponse handle(std::string_view method, std::string_view path,
                     const std::map<std::string, std::string>& query,
                     std::string_view body);

  const ServiceConfig& config() const { return config_; }
  store::VoteStore& store() { return *store_; }
  void flush() { store_->flush(); }

 private:
  void ensure_prompt(const museum::PublicBattle& visible);
  std::vector<rating::BattleRecord> counted(Task task) const;
  std::vector<ModelId> rating_order(const std::vector<rating::BattleRecord>& battles) const;

  ServiceConfig config_;
  museum::Museum museum_;
  std::unique_ptr<store::VoteStore> store_;
  std::shared_ptr<const store::SafetyFilter> filter_;
  Clock clock_;

  std::mutex sample_mutex_;

  struct CachedBoard {
    std::vector<rating::BattleRecord> input;
    Json body;
  };
  std::mutex cache_mutex_;
  std::map<Task, CachedBoard> board_cache_;
};

}  // namespace arena::service

#endif  // ARENA_SERVICE_ARENA_SERVICE_H_
