#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "arena/errors.h"
#include "arena/rating/analysis.h"
#include "arena/rating/bradley_terry.h"
#include "arena/rating/elo.h"

namespace arena::rating {
namespace {

constexpr auto kA = BattleOutcome::kAWins;
constexpr auto kB = BattleOutcome::kBWins;
constexpr auto kTie = BattleOutcome::kTie;
constexpr auto kBad = BattleOutcome::kBothBad;

TEST(ExpectedScore, WorkedExample) {
  EXPECT_NEAR(expected_score(1200, 1100, 400), 0.6401, 1e-4);
}

TEST(ExpectedScore, EqualRatingsAreEven) {
  EXPECT_EQ(expected_score(1337, 1337, 400), 0.5);
}

TEST(ExpectedScore, FourHundredPointGap) {
  EXPECT_NEAR(expected_score(1000, 1400, 400), 1.0 / 11.0, 1e-15);
}

TEST(ExpectedScore, RejectsNonFinite) {
  EXPECT_THROW(expected_score(NAN, 1000, 400), DomainError);
  EXPECT_THROW(expected_score(1000, INFINITY, 400), DomainError);
  EXPECT_THROW(expected_score(1000, 1000, 0), DomainError);
}

TEST(ExpectedScore, ComplementAndTranslationProperties) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rating(-3000, 5000);
  for (int trial = 0; trial < 2000; ++trial) {
    const double a = rating(rng), b = rating(rng), c = rating(rng);
    EXPECT_NEAR(expected_score(a, b, 400) + expected_score(b, a, 400), 1.0,
                1e-12);
    EXPECT_NEAR(expected_score(a + c, b + c, 400), expected_score(a, b, 400),
                1e-12);
  }
}

TEST(EloUpdate, EvenMatch) {
  const auto [a, b] = elo_update(1000, 1000, kA, RatingConfig{});
  EXPECT_DOUBLE_EQ(a, 1016);
  EXPECT_DOUBLE_EQ(b, 984);
}

TEST(EloUpdate, FavoriteWinsAndTies) {
  // Oracle: direct arithmetic on the logistic formula.
  const double e = 1.0 / (1.0 + std::pow(10.0, -100.0 / 400.0));
  const auto win = elo_update(1200, 1100, kA, RatingConfig{});
  EXPECT_NEAR(win.first, 1200 + 32 * (1 - e), 1e-9);
  EXPECT_NEAR(win.first, 1211.52, 0.01);
  const auto tie = elo_update(1200, 1100, kTie, RatingConfig{});
  EXPECT_NEAR(tie.first, 1195.52, 0.01);
}

TEST(EloUpdate, BothBadPolicies) {
  RatingConfig config;
  const auto as_tie = elo_update(1200, 1100, kBad, config);
  EXPECT_EQ(as_tie, elo_update(1200, 1100, kTie, config));
  config.bothbad_policy = BothBadPolicy::kDiscard;
  const auto discarded = elo_update(1200, 1100, kBad, config);
  EXPECT_EQ(discarded.first, 1200);
  EXPECT_EQ(discarded.second, 1100);
}

TEST(EloUpdate, ZeroSumAndStepBound) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rating(0, 3000);
  std::uniform_int_distribution<int> outcome(0, 3);
  RatingConfig config;
  for (int trial = 0; trial < 5000; ++trial) {
    const double a = rating(rng), b = rating(rng);
    const auto [a2, b2] =
        elo_update(a, b, static_cast<BattleOutcome>(outcome(rng)), config);
    EXPECT_NEAR((a2 + b2) - (a + b), 0.0, 1e-9);
    EXPECT_LE(std::abs(a2 - a), config.k_factor);
  }
}

TEST(ReplayOnlineElo, SingleBattle) {
  const std::vector<BattleRecord> battles = {{"A", "B", kA}};
  const RatingTable table = replay_online_elo(battles, RatingConfig{});
  EXPECT_DOUBLE_EQ(table.at("A").rating, 1016);
  EXPECT_DOUBLE_EQ(table.at("B").rating, 984);
  EXPECT_EQ(table.at("A").battle_count, 1u);
}

TEST(ReplayOnlineElo, EmptyInput) {
  EXPECT_TRUE(replay_online_elo({}, RatingConfig{}).empty());
}

TEST(ReplayOnlineElo, OrderMatters) {
  // Hand replay: after A beats B the pair sits at 1016/984; B's win is then
  // worth 32 * (1 - E(984, 1016)).
  const double e_ba = 1.0 / (1.0 + std::pow(10.0, 32.0 / 400.0));
  const double expected_a = 1016.0 - 32.0 * (1.0 - e_ba);
  EXPECT_NEAR(expected_a, 998.5305, 1e-4);

  const std::vector<BattleRecord> battles = {{"A", "B", kA}, {"B", "A", kA}};
  const RatingTable table = replay_online_elo(battles, RatingConfig{});
  EXPECT_NEAR(table.at("A").rating, expected_a, 1e-9);
  EXPECT_NE(table.at("A").rating, 1000.0);
}

TEST(ReplayOnlineElo, ConservesTotalRating) {
  std::mt19937_64 rng(3);
  const std::vector<ModelId> models = {"m0", "m1", "m2", "m3", "m4", "m5"};
  std::uniform_int_distribution<std::size_t> pick(0, models.size() - 1);
  std::uniform_int_distribution<int> outcome(0, 3);
  std::vector<BattleRecord> battles;
  while (battles.size() < 3000) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    battles.push_back(
        {models[a], models[b], static_cast<BattleOutcome>(outcome(rng))});
  }
  const RatingTable table = replay_online_elo(battles, RatingConfig{});
  double sum = 0.0;
  for (const auto& [id, e] : table.entries) sum += e.rating;
  EXPECT_NEAR(sum, 1000.0 * table.size(), 1e-9 * battles.size());
}

TEST(PairwiseCounts, DecisiveVoteIsDuplicated) {
  const std::vector<BattleRecord> battles = {{"A", "B", kA}};
  const PairwiseCounts c = build_pairwise_counts(battles, RatingConfig{});
  EXPECT_EQ(c.w(0, 1), 2.0);
  EXPECT_EQ(c.w(1, 0), 0.0);
}

TEST(PairwiseCounts, TieIsSplit) {
  const std::vector<BattleRecord> battles = {{"A", "B", kTie}};
  const PairwiseCounts c = build_pairwise_counts(battles, RatingConfig{});
  EXPECT_EQ(c.w(0, 1), 1.0);
  EXPECT_EQ(c.w(1, 0), 1.0);
}

TEST(PairwiseCounts, BothBadFollowsPolicy) {
  const std::vector<BattleRecord> battles = {{"A", "B", kBad},
                                             {"A", "B", kB}};
  RatingConfig config;
  PairwiseCounts c = build_pairwise_counts(battles, config);
  EXPECT_EQ(c.w(0, 1), 1.0);
  EXPECT_EQ(c.w(1, 0), 3.0);
  config.bothbad_policy = BothBadPolicy::kDiscard;
  c = build_pairwise_counts(battles, config);
  EXPECT_EQ(c.w(0, 1), 0.0);
  EXPECT_EQ(c.w(1, 0), 2.0);
}

TEST(PairwiseCounts, EmptyAndInvalid) {
  EXPECT_EQ(build_pairwise_counts({}, RatingConfig{}).size(), 0u);
  const std::vector<BattleRecord> self = {{"A", "A", kA}};
  EXPECT_THROW(build_pairwise_counts(self, RatingConfig{}), DomainError);
  const std::vector<BattleRecord> negative = {{"A", "B", kA, -1.0}};
  EXPECT_THROW(build_pairwise_counts(negative, RatingConfig{}), DomainError);
}

TEST(WinFraction, CountsDecisiveBattles) {
  const std::vector<BattleRecord> battles = {
      {"A", "B", kA}, {"A", "B", kA}, {"B", "A", kB},
      {"A", "B", kB}, {"A", "B", kTie}, {"B", "C", kTie}};
  const ModelMatrix m = win_fraction_matrix(battles);
  EXPECT_DOUBLE_EQ(*m.at("A", "B"), 0.75);
  EXPECT_DOUBLE_EQ(*m.at("B", "A"), 0.25);
  EXPECT_FALSE(m.at("B", "C").has_value());
  EXPECT_FALSE(m.at("A", "A").has_value());
}

TEST(WinFraction, DefinedCellsAreComplementary) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, 4), outcome(0, 3);
  std::vector<BattleRecord> battles;
  while (battles.size() < 400) {
    const int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    battles.push_back({"m" + std::to_string(a), "m" + std::to_string(b),
                       static_cast<BattleOutcome>(outcome(rng))});
  }
  const ModelMatrix m = win_fraction_matrix(battles);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m.at(i, j)) EXPECT_DOUBLE_EQ(*m.at(i, j) + *m.at(j, i), 1.0);
}

TEST(BattleCount, TiesExcludedOnRequest) {
  const std::vector<BattleRecord> battles = {
      {"A", "B", kA}, {"B", "A", kA}, {"A", "B", kB}, {"A", "B", kTie}};
  const ModelMatrix without = battle_count_matrix(battles, false);
  EXPECT_EQ(*without.at("A", "B"), 3.0);
  EXPECT_EQ(*without.at("B", "A"), 3.0);
  const ModelMatrix with = battle_count_matrix(battles, true);
  EXPECT_EQ(*with.at("A", "B"), 4.0);
  EXPECT_EQ(*with.at("A", "A"), 0.0);
  EXPECT_EQ(battle_count_matrix({}, false).size(), 0u);
}

TEST(AverageWinRate, Examples) {
  RatingTable t;
  t.entries["A"].rating = 1200;
  t.entries["B"].rating = 1100;
  auto rates = average_win_rate(t, 400);
  EXPECT_NEAR(rates["A"], 0.6401, 1e-4);
  EXPECT_NEAR(rates["B"], 0.3599, 1e-4);

  RatingTable flat;
  for (const char* id : {"A", "B", "C"}) flat.entries[id].rating = 1000;
  for (const auto& [id, r] : average_win_rate(flat, 400)) EXPECT_EQ(r, 0.5);

  RatingTable single;
  single.entries["A"].rating = 1000;
  EXPECT_THROW(average_win_rate(single, 400), DomainError);
}

TEST(MatrixCsv, UndefinedCellsAreEmpty) {
  const std::vector<BattleRecord> battles = {
      {"A", "B", kA}, {"A", "B", kA}, {"A", "B", kA}, {"A", "B", kB},
      {"B", "C", kTie}};
  std::ostringstream out;
  write_matrix_csv(out, win_fraction_matrix(battles).reordered({"C", "A"}));
  EXPECT_EQ(out.str(),
            "model,C,A,B\n"
            "C,,,\n"
            "A,,,0.75\n"
            "B,,0.25,\n");
}

TEST(LeaderboardCsv, SortedWithOptionalBounds) {
  RatingTable t;
  t.entries["low"] = {950.0, std::nullopt, std::nullopt, 3, 0};
  t.entries["high"] = {1050.123456789, 1040.0, 1060.5, 4, 0};
  std::ostringstream out;
  write_leaderboard_csv(out, t);
  EXPECT_EQ(out.str(),
            "model,rating,ci_lower,ci_upper,battles\n"
            "high,1050.12,1040,1060.5,4\n"
            "low,950,,,3\n");
}

}  // namespace
}  // namespace arena::rating
