#include "arena/simulator/simulator.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "arena/errors.h"
#include "arena/rating/analysis.h"
#include "arena/rating/bradley_terry.h"
#include "arena/rating/elo.h"
#include "arena/store/vote_store.h"

namespace arena::simulator {
namespace {

using rating::BattleOutcome;

class OutcomeSampler {
 public:
  OutcomeSampler(const SyntheticPopulation& pop, double alpha)
      : pop_(pop), alpha_(alpha), jitter_(0.0, pop.noise > 0 ? pop.noise : 1.0) {}

  BattleOutcome draw(double ra, double rb, std::mt19937_64& rng) {
    const double u = unit_(rng);
    if (u < pop_.tie_rate) return BattleOutcome::kTie;
    if (u < pop_.tie_rate + pop_.bothbad_rate) return BattleOutcome::kBothBad;
    if (pop_.noise > 0) {
      ra += jitter_(rng);
      rb += jitter_(rng);
    }
    return unit_(rng) < rating::expected_score(ra, rb, alpha_) ? BattleOutcome::kAWins
                                                               : BattleOutcome::kBWins;
  }

 private:
  const SyntheticPopulation& pop_;
  double alpha_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> jitter_;
};

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

SeedResult run_seed(const SyntheticPopulation& pop, std::size_t n,
                    PairingStrategy pairing, std::uint64_t seed,
                    const rating::RatingConfig& config) {
  const auto battles = simulate_votes(pop, n, pairing, seed, config.alpha);
  const auto table = rating::fit_battles(battles, config);

  double mean = 0.0;
  for (const auto& [m, r] : pop.true_ratings) mean += r;
  mean /= static_cast<double>(pop.true_ratings.size());

  SeedResult out;
  out.seed = seed;
  out.ordering_exact = table.entries.size() == pop.true_ratings.size();
  std::vector<double> truth, fitted;
  double abs_err = 0.0;
  for (const auto& [m, r] : pop.true_ratings) {
    auto it = table.entries.find(m);
    if (it == table.entries.end()) continue;
    out.fitted[m] = it->second.rating;
    truth.push_back(r);
    fitted.push_back(it->second.rating);
    abs_err += std::abs(it->second.rating - (r - mean + config.anchor));
  }
  out.mean_abs_error = fitted.empty() ? 0.0 : abs_err / static_cast<double>(fitted.size());
  for (std::size_t i = 0; i < truth.size() && out.ordering_exact; ++i)
    for (std::size_t j = 0; j < truth.size(); ++j)
      if (truth[i] > truth[j] && !(fitted[i] > fitted[j])) {
        out.ordering_exact = false;
        break;
      }
  if (truth.size() >= 2) out.spearman = spearman_correlation(truth, fitted);
  return out;
}

}  // namespace

void SyntheticPopulation::validate() const {
  if (true_ratings.size() < 2)
    throw DomainError("population needs at least 2 models");
  for (const auto& [m, r] : true_ratings)
    if (!std::isfinite(r)) throw DomainError("non-finite true rating for " + m);
  if (!(tie_rate >= 0 && tie_rate < 1) || !(bothbad_rate >= 0 && bothbad_rate < 1) ||
      !(tie_rate + bothbad_rate < 1))
    throw DomainError("tie_rate and bothbad_rate must be in [0, 1) with sum < 1");
  if (!(noise >= 0) || !std::isfinite(noise)) throw DomainError("noise must be >= 0");
}

SyntheticPopulation parse_population(std::string_view spec) {
  SyntheticPopulation pop;
  std::stringstream ss{std::string(spec)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.rfind('=');
    if (eq == std::string::npos || eq == 0)
      throw ValidationError("model spec '" + item + "' is not NAME=RATING");
    const std::string name = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double r = 0;
    try {
      r = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(r))
      throw ValidationError("bad rating '" + value + "' for model " + name);
    if (!pop.true_ratings.emplace(name, r).second)
      throw ValidationError("model " + name + " listed twice");
  }
  if (pop.true_ratings.size() < 2)
    throw ValidationError("need at least two models in '" + std::string(spec) + "'");
  return pop;
}

std::vector<BattleRecord> simulate_votes(const SyntheticPopulation& pop, std::size_t n,
                                         PairingStrategy pairing, std::uint64_t seed,
                                         double alpha) {
  pop.validate();
  if (n == 0) throw DomainError("empty battle set: n must be positive");
  std::vector<ModelId> models;
  std::vector<double> ratings;
  for (const auto& [m, r] : pop.true_ratings) {
    models.push_back(m);
    ratings.push_back(r);
  }
  const std::size_t k = models.size();
  std::mt19937_64 rng(seed);
  OutcomeSampler sampler(pop, alpha);
  std::vector<std::size_t> pair_count(k * k, 0);
  std::vector<std::pair<std::size_t, std::size_t>> best;

  std::vector<BattleRecord> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t a, b;
    if (pairing == PairingStrategy::kUniformPair) {
      a = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
      b = std::uniform_int_distribution<std::size_t>(0, k - 2)(rng);
      if (b >= a) ++b;
    } else {
      std::size_t lowest = SIZE_MAX;
      best.clear();
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
          const std::size_t c = pair_count[i * k + j];
          if (c < lowest) {
            lowest = c;
            best.clear();
          }
          if (c == lowest) best.emplace_back(i, j);
        }
      std::tie(a, b) =
          best[std::uniform_int_distribution<std::size_t>(0, best.size() - 1)(rng)];
      ++pair_count[a * k + b];
      if (std::bernoulli_distribution(0.5)(rng)) std::swap(a, b);
    }
    out.push_back({models[a], models[b], sampler.draw(ratings[a], ratings[b], rng)});
  }
  return out;
}

std::vector<BattleRecord> simulate_weighted_votes(const SyntheticPopulation& pop,
                                                  std::span<const PairWeight> pairs,
                                                  std::size_t n, std::uint64_t seed,
                                                  double alpha) {
  pop.validate();
  if (n == 0) throw DomainError("empty battle set: n must be positive");
  if (pairs.empty()) throw DomainError("no pairs to sample from");
  std::vector<double> weights;
  for (const auto& p : pairs) {
    if (!pop.true_ratings.count(p.a) || !pop.true_ratings.count(p.b) || p.a == p.b)
      throw DomainError("pair " + p.a + "/" + p.b + " is not two population models");
    if (!(p.weight > 0) || !std::isfinite(p.weight))
      throw DomainError("pair weights must be positive");
    weights.push_back(p.weight);
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  OutcomeSampler sampler(pop, alpha);
  std::vector<BattleRecord> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto& p = pairs[pick(rng)];
    const bool swap = std::bernoulli_distribution(0.5)(rng);
    const ModelId& a = swap ? p.b : p.a;
    const ModelId& b = swap ? p.a : p.b;
    out.push_back(
        {a, b, sampler.draw(pop.true_ratings.at(a), pop.true_ratings.at(b), rng)});
  }
  return out;
}

std::optional<double> spearman_correlation(std::span<const double> x,
                                           std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("spearman: length mismatch");
  if (x.size() < 2) return std::nullopt;
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double mean = (static_cast<double>(x.size()) + 1.0) / 2.0;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

RecoveryReport recovery_experiment(const SyntheticPopulation& pop, std::size_t n,
                                   PairingStrategy pairing,
                                   std::span<const std::uint64_t> seeds,
                                   const rating::RatingConfig& config,
                                   unsigned threads) {
  pop.validate();
  config.validate();
  if (n == 0) throw DomainError("empty battle set: n must be positive");
  if (seeds.empty()) throw DomainError("recovery experiment needs at least one seed");

  RecoveryReport report;
  report.n = n;
  report.runs.resize(seeds.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(seeds.size()));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(seeds.size());
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < seeds.size();) {
      try {
        report.runs[i] = run_seed(pop, n, pairing, seeds[i], config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::size_t exact = 0, defined = 0;
  double rho = 0, err = 0;
  for (const auto& run : report.runs) {
    exact += run.ordering_exact;
    err += run.mean_abs_error;
    if (run.spearman) {
      rho += *run.spearman;
      ++defined;
    }
  }
  const double count = static_cast<double>(report.runs.size());
  report.ordering_accuracy = static_cast<double>(exact) / count;
  report.mean_abs_rating_error = err / count;
  if (defined) report.rank_correlation = rho / static_cast<double>(defined);
  return report;
}

void RecoveryReport::write_jsonl(std::ostream& out) const {
  using Json = nlohmann::ordered_json;
  for (const auto& run : runs) {
    Json rec;
    rec["seed"] = run.seed;
    rec["ordering_exact"] = run.ordering_exact;
    rec["spearman"] = run.spearman ? Json(*run.spearman) : Json(nullptr);
    rec["mean_abs_error"] = run.mean_abs_error;
    rec["ratings"] = run.fitted;
    out << rec.dump() << '\n';
  }
  Json summary;
  summary["summary"] = true;
  summary["n"] = n;
  summary["seeds"] = runs.size();
  summary["ordering_accuracy"] = ordering_accuracy;
  summary["rank_correlation"] = rank_correlation ? Json(*rank_correlation) : Json(nullptr);
  summary["mean_abs_rating_error"] = mean_abs_rating_error;
  out << summary.dump() << '\n';
}

void RecoveryReport::write_summary(std::ostream& out) const {
  out << "battles per seed       " << n << '\n'
      << "seeds                  " << runs.size() << '\n'
      << "ordering accuracy      " << rating::format_number(ordering_accuracy) << '\n'
      << "mean spearman          "
      << (rank_correlation ? rating::format_number(*rank_correlation) : "n/a") << '\n'
      << "mean abs rating error  " << rating::format_number(mean_abs_rating_error) << '\n';
}

void write_battles_as_bench(std::span<const BattleRecord> battles, Task task,
                            std::ostream& out) {
  store::VoteStore store;
  store::Prompt prompt{"sim-prompt", task, "synthetic prompt", std::nullopt,
                       store::Safety::safe()};
  if (task == Task::kImageEditing) prompt.source_image_ref = "sim://source.png";
  store.add_prompt(prompt);
  char id[32];
  for (std::size_t i = 0; i < battles.size(); ++i) {
    std::snprintf(id, sizeof id, "sim-%06zu", i + 1);
    const auto& b = battles[i];
    const auto at = static_cast<TimestampMs>(i + 1);
    store.create_battle({id, task, prompt.id, b.model_a, b.model_b,
                         "sim://" + std::string(id) + "/a",
                         "sim://" + std::string(id) + "/b", store::BattleState::kOpen, at});
    store.record_vote(id, b.outcome, at);
  }
  store.export_bench(task, out);
}

SyntheticPopulation imbalance_population() {
  SyntheticPopulation pop;
  pop.true_ratings = {{"alpha", 1100}, {"beta", 1100}, {"gamma", 1000}, {"delta", 750}};
  pop.tie_rate = 0.1;
  return pop;
}

std::vector<PairWeight> imbalance_pairs() {
  return {{"alpha", "delta", 30}, {"alpha", "beta", 6}, {"alpha", "gamma", 4},
          {"beta", "gamma", 4},   {"beta", "delta", 2}, {"gamma", "delta", 4}};
}

std::vector<BattleRecord> imbalance_battles(std::uint64_t seed) {
  const auto pairs = imbalance_pairs();
  return simulate_weighted_votes(imbalance_population(), pairs, kImbalanceBattles, seed);
}

ImbalanceCheck check_imbalance(std::span<const BattleRecord> battles,
                               const rating::RatingConfig& config) {
  const auto table = rating::fit_battles(battles, config);
  const auto ranked = table.ranked_models();
  if (ranked.size() < 2) throw DomainError("imbalance check needs two rated models");
  ImbalanceCheck check;
  check.top = ranked[0];
  check.runner_up = ranked[1];
  check.rating_gap = table.at(ranked[0]).rating - table.at(ranked[1]).rating;
  check.head_to_head = rating::win_fraction_matrix(battles).at(check.top, check.runner_up);
  return check;
}

}  // namespace arena::simulator
