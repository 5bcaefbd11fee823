#ifndef ARENA_JUDGE_CLIENT_H_
#define ARENA_JUDGE_CLIENT_H_

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arena/judge/correlation.h"
#include "arena/judge/scores.h"
#include "arena/judge/templates.h"

namespace arena::judge {

struct JudgeRequest {
  std::string prompt;               // rendered template
  std::vector<std::string> media;   // image URIs or extracted video frames
};

// External multimodal judge. Implementations must be callable from several
// threads at once.
class JudgeClient {
 public:
  virtual ~JudgeClient() = default;
  virtual std::string complete(const JudgeRequest& request) = 0;
};

// Serves recorded responses, matched on the exact prompt and media list.
// Line-delimited records {prompt, media, response}.
class ReplayJudgeClient : public JudgeClient {
 public:
  static ReplayJudgeClient from_file(const std::filesystem::path& path);
  void add(const JudgeRequest& request, std::string response);

  // NotFoundError when the request was never recorded.
  std::string complete(const JudgeRequest& request) override;
  std::size_t size() const { return responses_.size(); }

 private:
  std::map<std::pair<std::string, std::vector<std::string>>, std::string> responses_;
};

// Forwards to a live client and appends each exchange to a replay file.
class RecordingJudgeClient : public JudgeClient {
 public:
  RecordingJudgeClient(JudgeClient& live, const std::filesystem::path& path);
  std::string complete(const JudgeRequest& request) override;

 private:
  JudgeClient& live_;
  std::mutex mutex_;
  std::ofstream out_;
};

// Turns a video reference into image frames for the judge.
class FrameExtractor {
 public:
  virtual ~FrameExtractor() = default;
  virtual std::vector<std::string> frames(const std::string& video_uri) const = 0;
};

// Pre-extracted frames listed in line-delimited records {video_uri, frames}.
class FixtureFrameExtractor : public FrameExtractor {
 public:
  static FixtureFrameExtractor from_file(const std::filesystem::path& path);
  void add(std::string video_uri, std::vector<std::string> frames);
  std::vector<std::string> frames(const std::string& video_uri) const override;

 private:
  std::map<std::string, std::vector<std::string>> frames_;
};

// One generated output to be scored.
struct JudgeItem {
  std::string battle_id;
  Side side = Side::kLeft;
  Task task = Task::kTextToVideo;
  std::string prompt_text;
  std::string artifact_uri;
  bool is_video = false;
};

struct JudgedOutput {
  std::string battle_id;
  Side side;
  SubScores scores;
  double naturalness = 0.0;
  double artifacts = 0.0;
};

// Asks the judge for both aspects of every item and aggregates the result.
// Runs up to `parallelism` requests at once; results keep input order.
// Videos go through `extractor` (required when any item is a video).
std::vector<JudgedOutput> judge_outputs(std::span<const JudgeItem> items,
                                        JudgeClient& client,
                                        const TemplateRegistry& templates,
                                        const FrameExtractor* extractor,
                                        unsigned parallelism = 4);

}  // namespace arena::judge

#endif  // ARENA_JUDGE_CLIENT_H_
