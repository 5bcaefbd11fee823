// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.
#ifndef ARENA_TESTS_ORACLES_H_
#define ARENA_TESTS_ORACLES_H_

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "arena/rating/types.h"

namespace arena::testing {

// Log-likelihood sum_{i != j} w(i, j) * log P(i beats j), evaluated in
// extended precision straight from the base-10 logistic.
inline long double bt_log_likelihood(const rating::PairwiseCounts& counts,
                                     const std::vector<long double>& r,
                                     long double alpha) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts.size(); ++j) {
      if (i == j || counts.w(i, j) == 0.0) continue;
      const long double p = 1.0L / (1.0L + std::pow(10.0L, (r[j] - r[i]) / alpha));
      total += static_cast<long double>(counts.w(i, j)) * std::log(p);
    }
  }
  return total;
}

// Central finite differences of bt_log_likelihood on the rating scale.
inline std::vector<double> bt_fd_gradient(const rating::PairwiseCounts& counts,
                                          const rating::RatingTable& table,
                                          double alpha, double step = 1e-5) {
  std::vector<long double> r(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    r[i] = table.at(counts.models()[i]).rating;
  std::vector<double> grad(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const long double saved = r[i];
    r[i] = saved + step;
    const long double up = bt_log_likelihood(counts, r, alpha);
    r[i] = saved - step;
    const long double down = bt_log_likelihood(counts, r, alpha);
    r[i] = saved;
    grad[i] = static_cast<double>((up - down) / (2.0L * step));
  }
  return grad;
}

// Random battle log with outcomes drawn from the logistic model at the
// given true ratings; ties with probability `tie_rate`.
inline std::vector<rating::BattleRecord> synthetic_log(
    const std::vector<double>& true_ratings, std::size_t n, unsigned seed,
    double tie_rate = 0.1) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, true_ratings.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<rating::BattleRecord> out;
  while (out.size() < n) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    rating::BattleRecord rec{"model_" + std::to_string(a),
                             "model_" + std::to_string(b)};
    const double p =
        1.0 / (1.0 + std::pow(10.0, (true_ratings[b] - true_ratings[a]) / 400.0));
    if (u(rng) < tie_rate) {
      rec.outcome = rating::BattleOutcome::kTie;
    } else {
      rec.outcome = u(rng) < p ? rating::BattleOutcome::kAWins
                               : rating::BattleOutcome::kBWins;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

// Sample Pearson correlation from the textbook definition,
// cov(x, y) / (sd(x) * sd(y)), in extended precision.
inline double brute_force_pearson(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const long double n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double cov = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  cov /= (n - 1);
  const long double sx = std::sqrt(vx / (n - 1));
  const long double sy = std::sqrt(vy / (n - 1));
  return static_cast<double>(cov / (sx * sy));
}

}  // namespace arena::testing

#endif  // ARENA_TESTS_ORACLES_H_
