#include "arena/judge/correlation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "arena/errors.h"

namespace arena::judge {
namespace {

using Json = nlohmann::ordered_json;

std::string cell_text(const std::optional<double>& r) {
  if (!r) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *r);
  return buf;
}

}  // namespace

std::optional<double> pearson_correlation(std::span<const double> x,
                                          std::span<const double> y) {
  if (x.size() != y.size())
    throw DomainError("pearson: length mismatch (" + std::to_string(x.size()) +
                      " vs " + std::to_string(y.size()) + ")");
  if (x.size() < 2) throw DomainError("pearson: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

int encode_vote(rating::BattleOutcome outcome) {
  switch (outcome) {
    case rating::BattleOutcome::kAWins: return 1;
    case rating::BattleOutcome::kBWins: return -1;
    default: return 0;
  }
}

std::string_view to_string(Side side) { return side == Side::kLeft ? "left" : "right"; }

Side parse_side(std::string_view name) {
  if (name == "left" || name == "a") return Side::kLeft;
  if (name == "right" || name == "b") return Side::kRight;
  throw ValidationError("unknown side '" + std::string(name) + "'");
}

std::optional<double> correlate_metric_with_votes(const ScoreMap& scores,
                                                  std::span<const EncodedVote> votes,
                                                  Subscore subscore) {
  std::vector<double> x, y;
  std::vector<std::string> missing;
  for (const auto& v : votes) {
    auto l = scores.find({v.battle_id, Side::kLeft});
    auto r = scores.find({v.battle_id, Side::kRight});
    if (l == scores.end() || r == scores.end()) {
      missing.push_back(v.battle_id);
      continue;
    }
    x.push_back(v.value);
    y.push_back(select(l->second, subscore) - select(r->second, subscore));
  }
  if (!missing.empty()) {
    std::string msg = "missing scores for " + std::to_string(missing.size()) +
                      " battle(s):";
    for (const auto& id : missing) msg += " " + id;
    throw ValidationError(msg);
  }
  return pearson_correlation(x, y);
}

std::map<std::string, ScoreMap> load_score_fixture(std::istream& in) {
  std::map<std::string, ScoreMap> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json rec = Json::parse(line);
      const std::string metric = rec.value("metric", std::string("judge"));
      ScoreKey key{rec.at("battle_id").get<std::string>(),
                   parse_side(rec.at("side").get<std::string>())};
      const auto s = aggregate_scores(rec.at("semantics").get<double>(),
                                      rec.at("naturalness").get<double>(),
                                      rec.at("artifacts").get<double>());
      if (!out[metric].emplace(key, s).second)
        throw ParseError("duplicate score for " + key.first + "/" +
                             std::string(to_string(key.second)) + " (" + metric + ")",
                         lineno, line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), lineno, line);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), lineno, line);
    }
  }
  return out;
}

std::map<std::string, ScoreMap> load_score_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open score file: " + path.string());
  return load_score_fixture(in);
}

ScoreMap random_scores(std::span<const EncodedVote> votes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  ScoreMap out;
  for (const auto& v : votes) {
    for (Side side : {Side::kLeft, Side::kRight}) {
      const double s = u(rng);
      out[{v.battle_id, side}] = aggregate_scores(s, s, s);
    }
  }
  return out;
}

CorrelationReport build_correlation_report(
    const std::vector<std::pair<std::string, ScoreMap>>& metrics,
    std::span<const EncodedVote> votes, std::span<const Subscore> subscores) {
  CorrelationReport report;
  report.subscores.assign(subscores.begin(), subscores.end());
  std::map<Task, std::vector<EncodedVote>> by_task;
  for (const auto& v : votes) by_task[v.task].push_back(v);
  for (const auto& [task, _] : by_task) report.tasks.push_back(task);

  for (const auto& [name, scores] : metrics) {
    report.metrics.push_back(name);
    std::set<std::string> scored;
    for (const auto& [key, _] : scores) scored.insert(key.first);
    for (const auto& [task, task_votes] : by_task) {
      const bool any = std::any_of(task_votes.begin(), task_votes.end(),
                                   [&](const EncodedVote& v) {
                                     return scored.count(v.battle_id) != 0;
                                   });
      if (!any) continue;
      for (Subscore sub : subscores) {
        std::optional<double> r;
        try {
          r = correlate_metric_with_votes(scores, task_votes, sub);
        } catch (const ValidationError& e) {
          throw ValidationError(name + " on " + std::string(to_string(task)) + ": " +
                                e.what());
        }
        report.cells[{name, task, sub}] = r;
      }
    }
  }
  return report;
}

void CorrelationReport::write_table(std::ostream& out) const {
  std::vector<std::string> header{"metric"};
  for (Task t : tasks)
    for (Subscore s : subscores)
      header.push_back(std::string(to_string(t)) + ":" + std::string(to_string(s)));
  std::vector<std::vector<std::string>> rows{header};
  for (const auto& m : metrics) {
    std::vector<std::string> row{m};
    for (Task t : tasks)
      for (Subscore s : subscores) {
        auto it = cells.find({m, t, s});
        row.push_back(it == cells.end() ? "-" : cell_text(it->second));
      }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      out << row[c];
      if (c + 1 < row.size()) out << std::string(width[c] - row[c].size(), ' ');
    }
    out << '\n';
  }
}

void CorrelationReport::write_csv(std::ostream& out) const {
  out << "metric,task,subscore,pearson\n";
  for (const auto& m : metrics)
    for (Task t : tasks)
      for (Subscore s : subscores) {
        auto it = cells.find({m, t, s});
        if (it == cells.end()) continue;
        out << m << ',' << to_string(t) << ',' << to_string(s) << ',';
        if (it->second) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.6g", *it->second);
          out << buf;
        }
        out << '\n';
      }
}

}  // namespace arena::judge
