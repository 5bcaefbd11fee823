#include "arena/rating/analysis.h"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include "arena/errors.h"
#include "arena/rating/elo.h"

namespace arena::rating {
namespace {

// Models in order of first appearance.
std::vector<ModelId> collect_models(std::span<const BattleRecord> battles,
                                    std::unordered_map<ModelId, std::size_t>* index) {
  std::vector<ModelId> models;
  for (const BattleRecord& b : battles) {
    for (const ModelId* id : {&b.model_a, &b.model_b}) {
      if (index->try_emplace(*id, models.size()).second) models.push_back(*id);
    }
  }
  return models;
}

bool is_decisive(BattleOutcome outcome) {
  return outcome == BattleOutcome::kAWins || outcome == BattleOutcome::kBWins;
}

}  // namespace

std::optional<double> ModelMatrix::at(const ModelId& a, const ModelId& b) const {
  auto ia = std::find(models.begin(), models.end(), a);
  auto ib = std::find(models.begin(), models.end(), b);
  if (ia == models.end() || ib == models.end()) return std::nullopt;
  return at(static_cast<std::size_t>(ia - models.begin()),
            static_cast<std::size_t>(ib - models.begin()));
}

ModelMatrix ModelMatrix::reordered(const std::vector<ModelId>& order) const {
  std::vector<std::size_t> perm;
  std::vector<char> used(size(), 0);
  for (const ModelId& id : order) {
    auto it = std::find(models.begin(), models.end(), id);
    if (it == models.end()) continue;
    const auto k = static_cast<std::size_t>(it - models.begin());
    if (!used[k]) {
      used[k] = 1;
      perm.push_back(k);
    }
  }
  for (std::size_t k = 0; k < size(); ++k)
    if (!used[k]) perm.push_back(k);

  ModelMatrix out;
  out.cells.resize(cells.size());
  for (std::size_t k : perm) out.models.push_back(models[k]);
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = 0; j < perm.size(); ++j)
      out.at(i, j) = at(perm[i], perm[j]);
  return out;
}

ModelMatrix win_fraction_matrix(std::span<const BattleRecord> battles) {
  std::unordered_map<ModelId, std::size_t> index;
  ModelMatrix m;
  m.models = collect_models(battles, &index);
  const std::size_t n = m.size();
  std::vector<double> wins(n * n, 0.0);
  for (const BattleRecord& b : battles) {
    if (!is_decisive(b.outcome)) continue;
    std::size_t winner = index.at(b.model_a), loser = index.at(b.model_b);
    if (b.outcome == BattleOutcome::kBWins) std::swap(winner, loser);
    wins[winner * n + loser] += 1.0;
  }
  m.cells.assign(n * n, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double decisive = wins[i * n + j] + wins[j * n + i];
      if (i != j && decisive > 0.0) m.at(i, j) = wins[i * n + j] / decisive;
    }
  }
  return m;
}

ModelMatrix battle_count_matrix(std::span<const BattleRecord> battles,
                                bool include_ties) {
  std::unordered_map<ModelId, std::size_t> index;
  ModelMatrix m;
  m.models = collect_models(battles, &index);
  const std::size_t n = m.size();
  m.cells.assign(n * n, 0.0);
  for (const BattleRecord& b : battles) {
    if (!include_ties && !is_decisive(b.outcome)) continue;
    const std::size_t a = index.at(b.model_a), c = index.at(b.model_b);
    *m.at(a, c) += 1.0;
    *m.at(c, a) += 1.0;
  }
  return m;
}

std::map<ModelId, double> average_win_rate(const RatingTable& table,
                                           double alpha) {
  if (table.size() < 2)
    throw DomainError("average win rate needs at least two models");
  std::map<ModelId, double> out;
  const double others = static_cast<double>(table.size() - 1);
  for (const auto& [id, entry] : table.entries) {
    double total = 0.0;
    for (const auto& [other, other_entry] : table.entries) {
      if (other == id) continue;
      total += expected_score(entry.rating, other_entry.rating, alpha);
    }
    out[id] = total / others;
  }
  return out;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace {

// Quotes fields that would otherwise break the CSV grammar.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_matrix_csv(std::ostream& out, const ModelMatrix& matrix) {
  out << "model";
  for (const ModelId& id : matrix.models) out << ',' << csv_field(id);
  out << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << csv_field(matrix.models[i]);
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      out << ',';
      if (const auto& cell = matrix.at(i, j)) out << format_number(*cell);
    }
    out << '\n';
  }
}

void write_leaderboard_csv(std::ostream& out, const RatingTable& table) {
  out << "model,rating,ci_lower,ci_upper,battles\n";
  for (const ModelId& id : table.ranked_models()) {
    const RatingEntry& e = table.at(id);
    out << csv_field(id) << ',' << format_number(e.rating) << ',';
    if (e.ci_lower) out << format_number(*e.ci_lower);
    out << ',';
    if (e.ci_upper) out << format_number(*e.ci_upper);
    out << ',' << e.battle_count << '\n';
  }
}

void write_average_win_rate_csv(std::ostream& out, const std::vector<ModelId>& order,
                                const std::map<ModelId, double>& rates) {
  out << "model,average_win_rate\n";
  for (const ModelId& id : order)
    out << csv_field(id) << ',' << format_number(rates.at(id)) << '\n';
}

}  // namespace arena::rating
