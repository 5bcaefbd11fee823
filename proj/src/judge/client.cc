#include "arena/judge/client.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include <json.hpp>

#include "arena/errors.h"
#include "arena/judge/response.h"

namespace arena::judge {
namespace {

using Json = nlohmann::ordered_json;

template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(Json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), lineno, line);
    }
  }
}

}  // namespace

ReplayJudgeClient ReplayJudgeClient::from_file(const std::filesystem::path& path) {
  ReplayJudgeClient client;
  for_each_line(path, [&](const Json& rec) {
    client.add({rec.at("prompt").get<std::string>(),
                rec.value("media", std::vector<std::string>{})},
               rec.at("response").get<std::string>());
  });
  return client;
}

void ReplayJudgeClient::add(const JudgeRequest& request, std::string response) {
  responses_.insert_or_assign({request.prompt, request.media}, std::move(response));
}

std::string ReplayJudgeClient::complete(const JudgeRequest& request) {
  auto it = responses_.find({request.prompt, request.media});
  if (it == responses_.end())
    throw NotFoundError("no recorded judge response for request with " +
                        std::to_string(request.media.size()) + " media item(s)");
  return it->second;
}

RecordingJudgeClient::RecordingJudgeClient(JudgeClient& live,
                                           const std::filesystem::path& path)
    : live_(live), out_(path, std::ios::app) {
  if (!out_) throw UnavailableError("cannot open recording file " + path.string());
}

std::string RecordingJudgeClient::complete(const JudgeRequest& request) {
  std::string response = live_.complete(request);
  Json rec;
  rec["prompt"] = request.prompt;
  rec["media"] = request.media;
  rec["response"] = response;
  std::lock_guard lock(mutex_);
  out_ << rec.dump() << '\n';
  out_.flush();
  return response;
}

FixtureFrameExtractor FixtureFrameExtractor::from_file(const std::filesystem::path& path) {
  FixtureFrameExtractor ex;
  for_each_line(path, [&](const Json& rec) {
    ex.add(rec.at("video_uri").get<std::string>(),
           rec.at("frames").get<std::vector<std::string>>());
  });
  return ex;
}

void FixtureFrameExtractor::add(std::string video_uri, std::vector<std::string> frames) {
  frames_.insert_or_assign(std::move(video_uri), std::move(frames));
}

std::vector<std::string> FixtureFrameExtractor::frames(const std::string& video_uri) const {
  auto it = frames_.find(video_uri);
  if (it == frames_.end()) throw NotFoundError("no frames for " + video_uri);
  return it->second;
}

std::vector<JudgedOutput> judge_outputs(std::span<const JudgeItem> items,
                                        JudgeClient& client,
                                        const TemplateRegistry& templates,
                                        const FrameExtractor* extractor,
                                        unsigned parallelism) {
  for (const auto& item : items) {
    if (item.is_video && !extractor)
      throw ValidationError("video item " + item.battle_id + " needs a frame extractor");
    templates.get(item.task, JudgeAspect::kSemanticConsistency);
    templates.get(item.task, JudgeAspect::kPerceptualQuality);
  }

  std::vector<JudgedOutput> results(items.size());
  auto judge_one = [&](const JudgeItem& item) {
    std::vector<std::string> media =
        item.is_video ? extractor->frames(item.artifact_uri)
                      : std::vector<std::string>{item.artifact_uri};
    const auto& sem_t = templates.get(item.task, JudgeAspect::kSemanticConsistency);
    const auto& qual_t = templates.get(item.task, JudgeAspect::kPerceptualQuality);
    const auto sem = parse_judge_response(
        client.complete({render_judge_prompt(sem_t, item.prompt_text), media}),
        JudgeAspect::kSemanticConsistency);
    const auto qual = parse_judge_response(
        client.complete({render_judge_prompt(qual_t, item.prompt_text), media}),
        JudgeAspect::kPerceptualQuality);
    JudgedOutput out{item.battle_id, item.side, {}, qual.score[0], qual.score[1]};
    out.scores = aggregate_scores(sem.score[0], qual.score[0], qual.score[1]);
    return out;
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(items.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(items.size());
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < items.size();) {
      try {
        results[i] = judge_one(items[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace arena::judge
