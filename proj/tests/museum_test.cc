#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "arena/errors.h"
#include "arena/museum/museum.h"

namespace arena::museum {
namespace {

std::string entry(const std::string& prompt, const std::string& model,
                  const std::string& task = "text_to_image",
                  const std::string& media = "image") {
  return "{\"task\":\"" + task + "\",\"prompt_id\":\"" + prompt +
         "\",\"prompt_text\":\"text of " + prompt + "\",\"model_id\":\"" + model +
         "\",\"artifact_uri\":\"out/" + prompt + "/" + model + "\",\"media_type\":\"" +
         media + "\"}\n";
}

Museum from(const std::string& text) {
  std::istringstream in(text);
  return Museum::ingest(in);
}

std::size_t no_history(std::string_view, const ModelId&, const ModelId&) { return 0; }

TEST(Ingest, CountsEntriesAndGroups) {
  std::string manifest;
  for (const char* p : {"p1", "p2"})
    for (const char* m : {"A", "B", "C"}) manifest += entry(p, m);
  const Museum museum = from(manifest);
  EXPECT_EQ(museum.entry_count(), 6u);
  EXPECT_EQ(museum.group_count(), 2u);
  EXPECT_EQ(museum.groups(Task::kTextToImage).size(), 2u);
}

TEST(Ingest, DuplicateKeyIsRejected) {
  try {
    from(entry("p1", "A") + entry("p1", "B") + entry("p1", "A"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("p1, A"), std::string::npos);
  }
}

TEST(Ingest, MalformedLineCarriesNumber) {
  try {
    from(entry("p1", "A") + "\n{\"task\":\"text_to_image\"}\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Ingest, ValidatesMediaTypeAndUris) {
  EXPECT_THROW(from(entry("p1", "A", "text_to_video", "image")), ParseError);
  EXPECT_THROW(from(entry("p1", "A", "text_to_image", "video")), ParseError);
  EXPECT_THROW(from(entry("p1", "A", "image_editing")), ParseError);  // no source
  std::string bad = entry("p1", "A");
  bad.replace(bad.find("out/"), 4, "o t/");
  EXPECT_THROW(from(bad), ParseError);
}

TEST(Ingest, EmptyManifestCannotSample) {
  const Museum museum = from("");
  EXPECT_EQ(museum.entry_count(), 0u);
  EXPECT_FALSE(museum.can_sample(Task::kTextToImage));
  EXPECT_THROW(museum.sample_battle(Task::kTextToImage, PairingStrategy::kUniformPair,
                                    no_history, 1),
               UnavailableError);
}

TEST(Ingest, ShippedFixture) {
  const Museum museum = Museum::ingest_file(std::filesystem::path(ARENA_DATA_DIR) /
                                            "fixtures" / "museum_manifest.jsonl");
  EXPECT_TRUE(museum.can_sample(Task::kTextToImage));
  EXPECT_TRUE(museum.can_sample(Task::kImageEditing));
  EXPECT_TRUE(museum.can_sample(Task::kTextToVideo));
  const auto* g = museum.find_group(Task::kImageEditing, "edit-001");
  ASSERT_NE(g, nullptr);
  EXPECT_TRUE(g->source_image_uri.has_value());
}

TEST(Sample, TwoModelMuseumReturnsThatPairWithRandomSides) {
  const Museum museum = from(entry("p1", "A") + entry("p1", "B"));
  std::set<std::string> left;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SampledBattle s =
        museum.sample_battle(Task::kTextToImage, PairingStrategy::kUniformPair, no_history, seed);
    const std::set<std::string> pair = {s.sealed.model_a, s.sealed.model_b};
    EXPECT_EQ(pair, (std::set<std::string>{"A", "B"}));
    EXPECT_EQ(s.visible.output_a_uri, "out/p1/" + s.sealed.model_a);
    EXPECT_EQ(s.visible.output_b_uri, "out/p1/" + s.sealed.model_b);
    left.insert(s.sealed.model_a);
  }
  EXPECT_EQ(left.size(), 2u);
}

TEST(Sample, LeastBattledAvoidsTheBusiestPair) {
  const Museum museum = from(entry("p1", "A") + entry("p1", "B") + entry("p1", "C"));
  const std::map<std::set<std::string>, std::size_t> counts = {
      {{"A", "B"}, 30}, {{"A", "C"}, 10}, {{"B", "C"}, 10}};
  const PairHistory history = [&](std::string_view, const ModelId& a, const ModelId& b) {
    return counts.at({a, b});
  };
  std::set<std::set<std::string>> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SampledBattle s = museum.sample_battle(
        Task::kTextToImage, PairingStrategy::kLeastBattledPair, history, seed);
    const std::set<std::string> pair = {s.sealed.model_a, s.sealed.model_b};
    EXPECT_NE(pair, (std::set<std::string>{"A", "B"}));
    seen.insert(pair);
  }
  EXPECT_EQ(seen.size(), 2u);
}

TEST(Sample, DeterministicForSeedAndHistory) {
  std::string manifest;
  for (const char* p : {"p1", "p2", "p3"})
    for (const char* m : {"A", "B", "C", "D"}) manifest += entry(p, m);
  const Museum museum = from(manifest);
  for (std::uint64_t seed : {1ull, 7ull, 12345ull}) {
    const auto x = museum.sample_battle(Task::kTextToImage,
                                        PairingStrategy::kUniformPair, no_history, seed);
    const auto y = museum.sample_battle(Task::kTextToImage,
                                        PairingStrategy::kUniformPair, no_history, seed);
    EXPECT_EQ(x.visible.prompt_id, y.visible.prompt_id);
    EXPECT_EQ(x.sealed.model_a, y.sealed.model_a);
    EXPECT_EQ(x.sealed.model_b, y.sealed.model_b);
  }
}

TEST(Sample, OutputsShareOnePrompt) {
  std::string manifest;
  for (const char* p : {"p1", "p2", "p3"})
    for (const char* m : {"A", "B", "C"}) manifest += entry(p, m);
  const Museum museum = from(manifest);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = museum.sample_battle(Task::kTextToImage,
                                        PairingStrategy::kUniformPair, no_history, seed);
    const std::string prefix = "out/" + s.visible.prompt_id + "/";
    EXPECT_EQ(s.visible.output_a_uri.rfind(prefix, 0), 0u);
    EXPECT_EQ(s.visible.output_b_uri.rfind(prefix, 0), 0u);
    EXPECT_NE(s.sealed.model_a, s.sealed.model_b);
  }
}

TEST(Sample, LeastBattledKeepsPairCountsWithinOne) {
  std::string manifest;
  for (const char* m : {"A", "B", "C", "D", "E"}) manifest += entry("p1", m);
  const Museum museum = from(manifest);
  std::map<std::set<std::string>, std::size_t> counts;
  const PairHistory history = [&](std::string_view, const ModelId& a, const ModelId& b) {
    auto it = counts.find({a, b});
    return it == counts.end() ? std::size_t{0} : it->second;
  };
  const std::size_t pairs = 10;
  for (std::uint64_t n = 1; n <= 3 * pairs + 4; ++n) {
    const auto s = museum.sample_battle(Task::kTextToImage,
                                        PairingStrategy::kLeastBattledPair, history, n);
    ++counts[{s.sealed.model_a, s.sealed.model_b}];
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& [pair, c] : counts) hi = std::max(hi, c);
    lo = counts.size() < pairs ? 0 : SIZE_MAX;
    for (const auto& [pair, c] : counts) lo = std::min(lo, c);
    EXPECT_LE(hi - lo, 1u);
  }
}

TEST(Pairing, ParsesNames) {
  EXPECT_EQ(parse_pairing("uniform"), PairingStrategy::kUniformPair);
  EXPECT_EQ(parse_pairing("balanced"), PairingStrategy::kLeastBattledPair);
  EXPECT_THROW(parse_pairing("greedy"), ValidationError);
}

}  // namespace
}  // namespace arena::museum
