#include "arena/rating/bradley_terry.h"

#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "arena/errors.h"

namespace arena::rating {
namespace {

// log(1 + e^x) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Undirected connectivity: models i and j are linked when they met at all.
std::vector<int> label_components(const PairwiseCounts& counts,
                                  int* num_components) {
  const std::size_t n = counts.size();
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (label[start] >= 0) continue;
    std::deque<std::size_t> queue{start};
    label[start] = next;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j = 0; j < n; ++j) {
        if (label[j] < 0 && counts.w(i, j) + counts.w(j, i) > 0.0) {
          label[j] = next;
          queue.push_back(j);
        }
      }
    }
    ++next;
  }
  *num_components = next;
  return label;
}

// The MLE inside a component is finite iff the directed "beat" graph
// restricted to it is strongly connected.
bool strongly_connected(const PairwiseCounts& counts,
                        const std::vector<std::size_t>& members) {
  if (members.size() <= 1) return true;
  for (bool forward : {true, false}) {
    std::vector<char> seen(counts.size(), 0);
    std::deque<std::size_t> queue{members.front()};
    seen[members.front()] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j : members) {
        const double edge = forward ? counts.w(i, j) : counts.w(j, i);
        if (!seen[j] && edge > 0.0) {
          seen[j] = 1;
          ++reached;
          queue.push_back(j);
        }
      }
    }
    if (reached != members.size()) return false;
  }
  return true;
}

// Negative log-likelihood in natural-log strengths plus a per-component
// gauge term (sum of strengths squared) that pins each component's mean at
// zero without moving the optimum of the differences.
class Objective {
 public:
  Objective(const PairwiseCounts& counts, std::vector<int> component,
            int num_components, std::vector<double> ridge)
      : counts_(counts),
        component_(std::move(component)),
        num_components_(num_components),
        ridge_(std::move(ridge)) {}

  double value(const Eigen::VectorXd& theta) const {
    const std::size_t n = counts_.size();
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double w = counts_.w(i, j);
        if (w > 0.0) f += w * softplus(theta[j] - theta[i]);
      }
    }
    std::vector<double> sums(num_components_, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[component_[i]] += theta[i];
      f += 0.5 * ridge_[i] * theta[i] * theta[i];
    }
    for (double s : sums) f += 0.5 * s * s;
    return f;
  }

  void derivatives(const Eigen::VectorXd& theta, Eigen::VectorXd* grad,
                   Eigen::MatrixXd* hess) const {
    const std::size_t n = counts_.size();
    grad->setZero(n);
    hess->setZero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double w = counts_.w(i, j);
        if (!(w > 0.0)) continue;
        const double p = sigmoid(theta[i] - theta[j]);
        const double g = w * (1.0 - p);
        (*grad)[i] -= g;
        (*grad)[j] += g;
        const double h = w * p * (1.0 - p);
        (*hess)(i, i) += h;
        (*hess)(j, j) += h;
        (*hess)(i, j) -= h;
        (*hess)(j, i) -= h;
      }
    }
    std::vector<double> sums(num_components_, 0.0);
    for (std::size_t i = 0; i < n; ++i) sums[component_[i]] += theta[i];
    for (std::size_t i = 0; i < n; ++i) {
      (*grad)[i] += sums[component_[i]] + ridge_[i] * theta[i];
      (*hess)(i, i) += ridge_[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (component_[i] == component_[j]) (*hess)(i, j) += 1.0;
      }
    }
  }

 private:
  const PairwiseCounts& counts_;
  std::vector<int> component_;
  int num_components_;
  std::vector<double> ridge_;
};

constexpr double kStepTolerance = 1e-9;  // Elo points

}  // namespace

PairwiseCounts build_pairwise_counts(std::span<const BattleRecord> battles,
                                     const RatingConfig& config) {
  std::vector<ModelId> models;
  std::unordered_map<ModelId, std::size_t> index;
  auto intern = [&](const ModelId& id) {
    auto [it, inserted] = index.try_emplace(id, models.size());
    if (inserted) models.push_back(id);
    return it->second;
  };
  for (const BattleRecord& b : battles) {
    if (b.model_a == b.model_b)
      throw DomainError("battle between '" + b.model_a + "' and itself");
    intern(b.model_a);
    intern(b.model_b);
  }

  PairwiseCounts counts(std::move(models));
  for (const BattleRecord& b : battles) {
    if (!(b.weight >= 0.0) || !std::isfinite(b.weight))
      throw DomainError("battle weight must be finite and non-negative");
    const std::size_t a = index.at(b.model_a);
    const std::size_t c = index.at(b.model_b);
    // Each vote counts twice; a duplicated tie gives one copy to each side.
    const double copies = 2.0 * b.weight;
    switch (b.outcome) {
      case BattleOutcome::kAWins:
        counts.add(a, c, copies);
        break;
      case BattleOutcome::kBWins:
        counts.add(c, a, copies);
        break;
      case BattleOutcome::kBothBad:
        if (config.bothbad_policy == BothBadPolicy::kDiscard) break;
        [[fallthrough]];
      case BattleOutcome::kTie:
        counts.add(a, c, copies / 2.0);
        counts.add(c, a, copies / 2.0);
        break;
    }
  }
  return counts;
}

RatingTable fit_bradley_terry(const PairwiseCounts& counts,
                              const RatingConfig& config) {
  config.validate();
  const std::size_t n = counts.size();
  if (n < 2) throw DomainError("Bradley-Terry fit needs at least two models");

  int num_components = 0;
  std::vector<int> component = label_components(counts, &num_components);
  std::vector<std::vector<std::size_t>> members(num_components);
  for (std::size_t i = 0; i < n; ++i) members[component[i]].push_back(i);

  std::vector<double> ridge(n, 0.0);
  for (const auto& group : members) {
    if (strongly_connected(counts, group)) continue;
    for (std::size_t i : group) ridge[i] = config.l2_reg;
  }

  const Objective objective(counts, component, num_components, ridge);
  const double scale = std::log(10.0) / config.alpha;  // d(theta)/d(rating)

  auto to_table = [&](const Eigen::VectorXd& theta) {
    RatingTable table;
    table.components = num_components;
    for (const auto& group : members) {
      double mean = 0.0;
      for (std::size_t i : group) mean += theta[i];
      mean /= static_cast<double>(group.size());
      for (std::size_t i : group) {
        RatingEntry& e = table.entries[counts.models()[i]];
        e.rating = config.anchor + (theta[i] - mean) / scale;
        e.component = component[i];
        double games = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          games += counts.w(i, j) + counts.w(j, i);
        e.battle_count = static_cast<std::size_t>(std::llround(games / 2.0));
      }
    }
    return table;
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  Eigen::VectorXd best = theta;
  double best_norm = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    objective.derivatives(theta, &grad, &hess);
    // Gradient w.r.t. Elo-scale ratings.
    const double norm = scale * grad.norm();
    if (norm < best_norm) {
      best_norm = norm;
      best = theta;
    }
    const Eigen::VectorXd step = hess.ldlt().solve(-grad);
    // A small gradient can still leave a visible rating error when the
    // curvature is small (few votes), so the Newton step must vanish too.
    if (norm <= config.convergence_tol &&
        step.lpNorm<Eigen::Infinity>() / scale <= kStepTolerance) {
      return to_table(theta);
    }
    const double f0 = objective.value(theta);
    const double slope = grad.dot(step);
    double t = 1.0;
    Eigen::VectorXd candidate = theta + step;
    double f1 = objective.value(candidate);
    // Below this decrement the objective cannot resolve the decrease and the
    // full Newton step is taken as is.
    const bool resolvable = -slope > 1e-12 * (1.0 + std::abs(f0));
    while (resolvable && f1 > f0 + 1e-4 * t * slope && t > 1e-12) {
      t *= 0.5;
      candidate = theta + t * step;
      f1 = objective.value(candidate);
    }
    theta = candidate;
  }

  objective.derivatives(theta, &grad, &hess);
  if (scale * grad.norm() <= config.convergence_tol) return to_table(theta);
  throw NonConvergenceError(
      "Bradley-Terry fit did not converge in " +
          std::to_string(config.max_iterations) + " iterations",
      to_table(best), best_norm);
}

RatingTable fit_battles(std::span<const BattleRecord> battles,
                        const RatingConfig& config) {
  return fit_bradley_terry(build_pairwise_counts(battles, config), config);
}

}  // namespace arena::rating
