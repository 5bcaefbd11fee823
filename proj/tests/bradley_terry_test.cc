#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "arena/errors.h"
#include "arena/rating/bootstrap.h"
#include "arena/rating/bradley_terry.h"
#include "oracles.h"

namespace arena::rating {
namespace {

constexpr auto kA = BattleOutcome::kAWins;
constexpr auto kB = BattleOutcome::kBWins;
constexpr auto kTie = BattleOutcome::kTie;

PairwiseCounts two_player(double a_wins, double b_wins) {
  PairwiseCounts c({"A", "B"});
  if (a_wins > 0) c.add(0, 1, a_wins);
  if (b_wins > 0) c.add(1, 0, b_wins);
  return c;
}

double mean_rating(const RatingTable& t) {
  double sum = 0;
  for (const auto& [id, e] : t.entries) sum += e.rating;
  return sum / t.size();
}

void expect_gradient_optimal(const PairwiseCounts& counts,
                             const RatingConfig& config) {
  const RatingTable fit = fit_bradley_terry(counts, config);
  for (double g : testing::bt_fd_gradient(counts, fit, config.alpha))
    EXPECT_LE(std::abs(g), 10 * config.convergence_tol);
}

TEST(BradleyTerry, TwoPlayerClosedForm) {
  // p = 3/4 maximizes 3 log p + log(1 - p); the gap is alpha*log10(p/(1-p)).
  const RatingTable t = fit_bradley_terry(two_player(3, 1), RatingConfig{});
  const double gap = t.at("A").rating - t.at("B").rating;
  EXPECT_NEAR(gap, 400 * std::log10(3.0), 1e-6);
  EXPECT_NEAR(gap, 190.85, 0.5);
  EXPECT_NEAR(mean_rating(t), 1000, 1e-6);
  EXPECT_EQ(t.at("A").battle_count, 2u);
}

TEST(BradleyTerry, SymmetricRoundRobinIsFlat) {
  PairwiseCounts c({"A", "B", "C", "D"});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) c.add(i, j, 7);
  for (const auto& [id, e] : fit_bradley_terry(c, RatingConfig{}).entries)
    EXPECT_NEAR(e.rating, 1000, 1e-6);
}

TEST(BradleyTerry, RecoversOrderingOfSyntheticTournament) {
  const std::vector<double> truth = {1200, 1100, 1000, 900, 800};
  const auto battles = testing::synthetic_log(truth, 2000, 17);
  const RatingTable t = fit_battles(battles, RatingConfig{});
  for (std::size_t i = 0; i + 1 < truth.size(); ++i) {
    EXPECT_GT(t.at("model_" + std::to_string(i)).rating,
              t.at("model_" + std::to_string(i + 1)).rating);
  }
}

TEST(BradleyTerry, RequiresTwoModels) {
  EXPECT_THROW(fit_bradley_terry(PairwiseCounts({"A"}), RatingConfig{}),
               DomainError);
  EXPECT_THROW(fit_bradley_terry(PairwiseCounts(), RatingConfig{}),
               DomainError);
}

TEST(BradleyTerry, NonConvergenceCarriesBestIterate) {
  RatingConfig config;
  config.max_iterations = 1;
  try {
    fit_bradley_terry(two_player(3, 1), config);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_EQ(e.best().size(), 2u);
    EXPECT_GT(e.gradient_norm(), config.convergence_tol);
  }
}

TEST(BradleyTerry, OrderInvariance) {
  const std::vector<double> truth = {1150, 1080, 1000, 960, 870, 820};
  auto battles = testing::synthetic_log(truth, 1000, 23);
  const RatingTable reference = fit_battles(battles, RatingConfig{});
  std::mt19937_64 rng(99);
  for (int round = 0; round < 100; ++round) {
    std::shuffle(battles.begin(), battles.end(), rng);
    const RatingTable t = fit_battles(battles, RatingConfig{});
    for (const auto& [id, e] : reference.entries)
      ASSERT_NEAR(t.at(id).rating, e.rating, 1e-6);
  }
}

TEST(BradleyTerry, GradientOptimalityOnFixtures) {
  RatingConfig config;
  expect_gradient_optimal(two_player(3, 1), config);
  expect_gradient_optimal(two_player(40, 1), config);
  const std::vector<double> truth = {1300, 1100, 1050, 1000, 700};
  for (unsigned seed : {1u, 2u, 3u}) {
    expect_gradient_optimal(
        build_pairwise_counts(testing::synthetic_log(truth, 1500, seed), config),
        config);
  }
  // Undefeated model: regularized component.
  PairwiseCounts sweep({"A", "B", "C"});
  sweep.add(0, 1, 4);
  sweep.add(0, 2, 2);
  sweep.add(1, 2, 3);
  sweep.add(2, 1, 1);
  expect_gradient_optimal(sweep, config);
}

TEST(BradleyTerry, TwoPlayerMonotonicity) {
  double previous = -INFINITY;
  for (double a_wins = 1; a_wins <= 40; a_wins += 1.5) {
    const RatingTable t = fit_bradley_terry(two_player(a_wins, 2), RatingConfig{});
    const double gap = t.at("A").rating - t.at("B").rating;
    EXPECT_GE(gap, previous);
    previous = gap;
  }
}

TEST(BradleyTerry, UniformScalingDoesNotMoveTheFit) {
  const std::vector<double> truth = {1100, 1000, 950, 900};
  const PairwiseCounts counts = build_pairwise_counts(
      testing::synthetic_log(truth, 600, 5), RatingConfig{});
  const RatingTable base = fit_bradley_terry(counts, RatingConfig{});
  const RatingTable doubled = fit_bradley_terry(counts.scaled(2), RatingConfig{});
  const RatingTable halved = fit_bradley_terry(counts.scaled(0.5), RatingConfig{});
  for (const auto& [id, e] : base.entries) {
    EXPECT_NEAR(doubled.at(id).rating, e.rating, 1e-6);
    EXPECT_NEAR(halved.at(id).rating, e.rating, 1e-6);
  }
}

TEST(BradleyTerry, TieSplittingMatchesHalfWeightTies) {
  // Duplicated-and-split counts equal twice the counts obtained by giving
  // each tie half a win per side, so the fits coincide.
  const std::vector<BattleRecord> battles = {
      {"A", "B", kA}, {"A", "B", kTie}, {"B", "C", kA}, {"C", "A", kTie},
      {"C", "B", kA}, {"A", "C", kB},   {"B", "A", kA}, {"A", "B", kA}};
  const RatingTable split = fit_battles(battles, RatingConfig{});
  PairwiseCounts undoubled({"A", "B", "C"});
  auto idx = [](const ModelId& m) { return static_cast<std::size_t>(m[0] - 'A'); };
  for (const BattleRecord& b : battles) {
    const std::size_t a = idx(b.model_a), c = idx(b.model_b);
    if (b.outcome == kA) undoubled.add(a, c, 1);
    if (b.outcome == kB) undoubled.add(c, a, 1);
    if (b.outcome == kTie) {
      undoubled.add(a, c, 0.5);
      undoubled.add(c, a, 0.5);
    }
  }
  const RatingTable half = fit_bradley_terry(undoubled, RatingConfig{});
  for (const auto& [id, e] : split.entries)
    EXPECT_NEAR(half.at(id).rating, e.rating, 1e-6);
}

TEST(BradleyTerry, UndefeatedModelStaysFinite) {
  const RatingTable t = fit_bradley_terry(two_player(5, 0), RatingConfig{});
  EXPECT_TRUE(std::isfinite(t.at("A").rating));
  EXPECT_GT(t.at("A").rating, t.at("B").rating);
  EXPECT_NEAR(mean_rating(t), 1000, 1e-6);
}

TEST(BradleyTerry, DisconnectedComponentsAreCenteredSeparately) {
  const std::vector<BattleRecord> battles = {
      {"A", "B", kA}, {"A", "B", kA}, {"A", "B", kB},
      {"C", "D", kB}, {"C", "D", kTie}, {"D", "C", kB}};
  const RatingTable t = fit_battles(battles, RatingConfig{});
  EXPECT_EQ(t.components, 2);
  EXPECT_EQ(t.at("A").component, t.at("B").component);
  EXPECT_EQ(t.at("C").component, t.at("D").component);
  EXPECT_NE(t.at("A").component, t.at("C").component);
  EXPECT_NEAR(t.at("A").rating + t.at("B").rating, 2000, 1e-6);
  EXPECT_NEAR(t.at("C").rating + t.at("D").rating, 2000, 1e-6);
  EXPECT_NEAR(t.at("A").rating - t.at("B").rating, 400 * std::log10(2.0), 1e-6);
}

// Counts where the Newton decrement drops below the objective's rounding
// level before the gradient meets the tolerance.
TEST(BradleyTerry, ConvergesWhenDecreaseIsBelowRounding) {
  PairwiseCounts c({"delta", "alpha", "beta", "gamma"});
  const double w[4][4] = {{0, 114, 11, 24}, {616, 0, 68, 67}, {43, 50, 0, 75}, {80, 27, 25, 0}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (w[i][j] > 0) c.add(i, j, w[i][j]);
  RatingConfig config;
  EXPECT_NO_THROW(fit_bradley_terry(c, config));
  expect_gradient_optimal(c, config);
}

TEST(BradleyTerry, Deterministic) {
  const auto battles = testing::synthetic_log({1000, 1100, 1200}, 300, 8);
  const RatingTable a = fit_battles(battles, RatingConfig{});
  const RatingTable b = fit_battles(battles, RatingConfig{});
  for (const auto& [id, e] : a.entries) EXPECT_EQ(b.at(id).rating, e.rating);
}

TEST(Bootstrap, IdenticalResamplesHaveZeroWidth) {
  const std::vector<BattleRecord> battles(12, {"A", "B", kA});
  const RatingTable t =
      bootstrap_confidence_interval(battles, 100, 1, RatingConfig{});
  for (const auto& [id, e] : t.entries) {
    ASSERT_TRUE(e.ci_lower && e.ci_upper);
    EXPECT_EQ(*e.ci_lower, e.rating);
    EXPECT_EQ(*e.ci_upper, e.rating);
  }
}

TEST(Bootstrap, BoundsOrderedAndReproducible) {
  const auto battles =
      testing::synthetic_log({1150, 1050, 1000, 920}, 400, 31);
  const RatingTable a =
      bootstrap_confidence_interval(battles, 100, 2024, RatingConfig{});
  const RatingTable b =
      bootstrap_confidence_interval(battles, 100, 2024, RatingConfig{});
  const RatingTable point = fit_battles(battles, RatingConfig{});
  for (const auto& [id, e] : a.entries) {
    ASSERT_TRUE(e.ci_lower && e.ci_upper);
    EXPECT_LE(*e.ci_lower, *e.ci_upper);
    EXPECT_LT(*e.ci_lower, *e.ci_upper);
    EXPECT_EQ(*e.ci_lower, *b.at(id).ci_lower);
    EXPECT_EQ(*e.ci_upper, *b.at(id).ci_upper);
    EXPECT_EQ(e.rating, point.at(id).rating);
  }
}

TEST(Bootstrap, SeedChangesResamples) {
  const auto battles = testing::synthetic_log({1100, 1000, 900}, 200, 4);
  const RatingTable a = bootstrap_confidence_interval(battles, 20, 1, RatingConfig{});
  const RatingTable b = bootstrap_confidence_interval(battles, 20, 2, RatingConfig{});
  EXPECT_NE(*a.at("model_0").ci_lower, *b.at("model_0").ci_lower);
}

TEST(Bootstrap, Errors) {
  const std::vector<BattleRecord> battles = {{"A", "B", kA}};
  EXPECT_THROW(bootstrap_confidence_interval(battles, 0, 1, RatingConfig{}),
               DomainError);
  EXPECT_THROW(bootstrap_confidence_interval({}, 10, 1, RatingConfig{}),
               DomainError);
}

}  // namespace
}  // namespace arena::rating
