#include "cli.h"

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <pthread.h>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "arena/errors.h"
#include "arena/judge/correlation.h"
#include "arena/rating/analysis.h"
#include "arena/rating/bootstrap.h"
#include "arena/rating/bradley_terry.h"
#include "arena/service/arena_service.h"
#include "arena/service/config.h"
#include "arena/service/http_server.h"
#include "arena/simulator/simulator.h"
#include "arena/store/vote_store.h"

namespace arena::cli {
namespace {

namespace fs = std::filesystem;

// Input problems that map to exit code 2.
class BadInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const char* const kCsvNote =
    "CSV numbers use '.' as decimal separator and 6 significant digits.";

// Writes `text` to `path` through a temporary file, or to `out` when the
// path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  const fs::path tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw BadInput("cannot write " + path);
    f << text;
    if (!f.flush()) throw BadInput("cannot write " + path);
  }
  fs::rename(tmp, path);
}

std::unique_ptr<store::VoteStore> read_votes(const std::string& path) {
  if (!fs::exists(path)) throw BadInput("vote file not found: " + path);
  return store::VoteStore::read(path);
}

rating::BothBadPolicy parse_bothbad(const std::string& v) {
  if (v == "tie") return rating::BothBadPolicy::kAsTie;
  if (v == "discard") return rating::BothBadPolicy::kDiscard;
  throw BadInput("--bothbad must be tie or discard");
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<ModelId> models_of(const std::vector<rating::BattleRecord>& battles) {
  std::set<ModelId> s;
  for (const auto& b : battles) {
    s.insert(b.model_a);
    s.insert(b.model_b);
  }
  return {s.begin(), s.end()};
}

void print_leaderboard(const rating::RatingTable& table, std::ostream& out) {
  std::size_t width = 5;
  for (const auto& [m, _] : table.entries) width = std::max(width, m.size());
  out << std::left << std::setw(5) << "rank" << std::setw(static_cast<int>(width) + 2) << "model"
      << std::right << std::setw(10) << "rating" << std::setw(20) << "CI (min/max)"
      << std::setw(10) << "battles" << '\n';
  int rank = 0;
  for (const auto& m : table.ranked_models()) {
    const auto& e = table.at(m);
    std::string ci = "-";
    if (e.ci_lower && e.ci_upper)
      ci = "+" + fixed(*e.ci_upper - e.rating) + "/-" + fixed(e.rating - *e.ci_lower);
    out << std::left << std::setw(5) << ++rank << std::setw(static_cast<int>(width) + 2) << m
        << std::right << std::setw(10) << fixed(e.rating) << std::setw(20) << ci
        << std::setw(10) << e.battle_count << '\n';
  }
}

struct RankOptions {
  std::string votes, task, csv, bothbad = "tie", safety = "safe_only";
  int rounds = rating::kDefaultBootstrapRounds;
  std::uint64_t seed = 0;
};

int cmd_rank(const RankOptions& o, std::ostream& out, std::ostream& err) {
  const Task task = parse_task(o.task);
  rating::RatingConfig config;
  config.bothbad_policy = parse_bothbad(o.bothbad);
  if (o.rounds < 1) throw BadInput("--rounds must be >= 1");
  const auto store = read_votes(o.votes);
  const auto battles = store->load_counted_votes(task, store::parse_safety_policy(o.safety));
  if (battles.empty()) {
    err << "no counted votes for " << to_string(task) << " in " << o.votes << '\n';
    return kExitBadInput;
  }
  if (models_of(battles).size() < 2) {
    err << "counted votes cover fewer than two models\n";
    return kExitBadInput;
  }
  const auto table = rating::bootstrap_confidence_interval(battles, o.rounds, o.seed, config);
  std::ostringstream csv;
  rating::write_leaderboard_csv(csv, table);
  print_leaderboard(table, out);
  if (!o.csv.empty()) emit(o.csv, csv.str(), out);
  return kExitOk;
}

struct HeatmapOptions {
  std::string votes, task, kind = "winfrac", csv, safety = "safe_only", bothbad = "tie";
  bool include_ties = false;
};

int cmd_heatmap(const HeatmapOptions& o, std::ostream& out, std::ostream&) {
  const Task task = parse_task(o.task);
  if (o.kind != "winfrac" && o.kind != "count" && o.kind != "avgwin")
    throw BadInput("--kind must be winfrac, count or avgwin");
  rating::RatingConfig config;
  config.bothbad_policy = parse_bothbad(o.bothbad);
  const auto store = read_votes(o.votes);
  const auto battles = store->load_counted_votes(task, store::parse_safety_policy(o.safety));
  std::vector<ModelId> order = models_of(battles);
  std::optional<rating::RatingTable> table;
  if (order.size() >= 2) {
    table = rating::fit_battles(battles, config);
    order = table->ranked_models();
  }
  std::ostringstream csv;
  if (o.kind == "winfrac") {
    rating::write_matrix_csv(csv, rating::win_fraction_matrix(battles).reordered(order));
  } else if (o.kind == "count") {
    rating::write_matrix_csv(
        csv, rating::battle_count_matrix(battles, o.include_ties).reordered(order));
  } else {
    std::map<ModelId, double> rates;
    if (table) rates = rating::average_win_rate(*table, config.alpha);
    else order.clear();
    rating::write_average_win_rate_csv(csv, order, rates);
  }
  emit(o.csv, csv.str(), out);
  return kExitOk;
}

struct SimulateOptions {
  std::string models, pairing = "uniform", report;
  std::size_t n = 2000;
  std::uint64_t seeds = 100, first_seed = 0;
  double tie_rate = 0.0, bothbad_rate = 0.0, noise = 0.0;
  unsigned threads = 0;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream&) {
  auto pop = simulator::parse_population(o.models);
  pop.tie_rate = o.tie_rate;
  pop.bothbad_rate = o.bothbad_rate;
  pop.noise = o.noise;
  try {
    pop.validate();
  } catch (const DomainError& e) {
    throw BadInput(e.what());
  }
  if (o.n == 0) throw BadInput("empty battle set: --n must be positive");
  if (o.seeds == 0) throw BadInput("--seeds must be positive");
  std::vector<std::uint64_t> seeds(o.seeds);
  for (std::uint64_t i = 0; i < o.seeds; ++i) seeds[i] = o.first_seed + i;
  const auto report = simulator::recovery_experiment(
      pop, o.n, museum::parse_pairing(o.pairing), seeds, rating::RatingConfig{}, o.threads);
  if (!o.report.empty()) {
    std::ostringstream lines;
    report.write_jsonl(lines);
    emit(o.report, lines.str(), out);
  }
  report.write_summary(out);
  return kExitOk;
}

struct CorrelateOptions {
  std::string scores, votes, task, csv, safety = "safe_only";
  std::vector<std::string> subscores;
  std::uint64_t random_seed = 0;
  bool no_random = false;
};

int cmd_correlate(const CorrelateOptions& o, std::ostream& out, std::ostream&) {
  if (!fs::exists(o.scores)) throw BadInput("score file not found: " + o.scores);
  const auto fixture = judge::load_score_fixture(fs::path(o.scores));
  const auto store = read_votes(o.votes);
  const auto policy = store::parse_safety_policy(o.safety);
  std::vector<judge::EncodedVote> votes;
  for (Task t : kAllTasks) {
    if (!o.task.empty() && parse_task(o.task) != t) continue;
    for (const auto& d : store->counted_votes(t, policy))
      votes.push_back({d.battle.id, t, judge::encode_vote(d.vote.outcome)});
  }
  if (votes.empty()) throw BadInput("no counted votes in " + o.votes);
  std::vector<judge::Subscore> subs;
  for (const auto& s : o.subscores) subs.push_back(judge::parse_subscore(s));
  if (subs.empty())
    subs = {judge::Subscore::kSemantics, judge::Subscore::kQuality, judge::Subscore::kOverall};

  std::vector<std::pair<std::string, judge::ScoreMap>> metrics(fixture.begin(), fixture.end());
  if (!o.no_random) metrics.emplace_back("Random", judge::random_scores(votes, o.random_seed));
  const auto report = judge::build_correlation_report(metrics, votes, subs);
  report.write_table(out);
  if (!o.csv.empty()) {
    std::ostringstream csv;
    report.write_csv(csv);
    emit(o.csv, csv.str(), out);
  }
  return kExitOk;
}

struct ExportOptions {
  std::string votes, task, out_path;
};

int cmd_export(const ExportOptions& o, std::ostream& out, std::ostream& err) {
  const Task task = parse_task(o.task);
  const auto store = read_votes(o.votes);
  std::size_t n = 0;
  if (o.out_path.empty() || o.out_path == "-") n = store->export_bench(task, out);
  else n = store->export_bench(task, fs::path(o.out_path));
  err << "exported " << n << " votes\n";
  return kExitOk;
}

struct ServeOptions {
  std::string config;
};

int cmd_serve(const ServeOptions& o, std::ostream& out, std::ostream& err) {
  service::ServiceConfig config;
  try {
    config = service::load_config(o.config);
    service::apply_env_overrides(config, service::process_env);
    config.validate();
  } catch (const ValidationError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitBadInput;
  }

  // Block termination signals before any thread starts so that only the
  // waiter below receives them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto svc = service::ArenaService::from_config(config);
  service::HttpServer server(*svc);
  const int port = server.bind(config.host, config.port);
  out << "listening on " << config.host << ':' << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  if (waiter.joinable()) {
    // listen() can also return on its own (socket failure); wake the waiter.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  svc->flush();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  err << "shut down cleanly\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GenAI arena tools: ratings, heatmaps, simulation, correlation, serving", "arena_cli"};
  app.require_subcommand(1);
  app.footer(std::string("Exit codes: 0 success, 1 internal error, 2 bad input. ") + kCsvNote);

  RankOptions rank;
  auto* rank_cmd = app.add_subcommand("rank", "Bradley-Terry leaderboard with bootstrap CI");
  rank_cmd->add_option("--votes", rank.votes, "vote log or bench export")->required();
  rank_cmd->add_option("--task", rank.task, "text_to_image|image_editing|text_to_video")
      ->required();
  rank_cmd->add_option("--rounds", rank.rounds, "bootstrap rounds")->capture_default_str();
  rank_cmd->add_option("--bothbad", rank.bothbad, "tie|discard")->capture_default_str();
  rank_cmd->add_option("--seed", rank.seed, "bootstrap seed")->capture_default_str();
  rank_cmd->add_option("--safety", rank.safety, "safe_only|all")->capture_default_str();
  rank_cmd->add_option("--csv", rank.csv, std::string("leaderboard CSV output. ") + kCsvNote);

  HeatmapOptions heat;
  auto* heat_cmd = app.add_subcommand("heatmap", "Rating-ordered pairwise matrices as CSV");
  heat_cmd->add_option("--votes", heat.votes, "vote log or bench export")->required();
  heat_cmd->add_option("--task", heat.task, "task")->required();
  heat_cmd->add_option("--kind", heat.kind, "winfrac|count|avgwin")->capture_default_str();
  heat_cmd->add_flag("--include-ties", heat.include_ties, "count Tie and BothBad battles");
  heat_cmd->add_option("--bothbad", heat.bothbad, "tie|discard")->capture_default_str();
  heat_cmd->add_option("--safety", heat.safety, "safe_only|all")->capture_default_str();
  heat_cmd->add_option("--csv", heat.csv, std::string("output path (default stdout). ") + kCsvNote);

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Rating recovery on synthetic votes");
  sim_cmd->add_option("--models", sim.models, "NAME=RATING,...")->required();
  sim_cmd->add_option("--n", sim.n, "battles per seed")->capture_default_str();
  sim_cmd->add_option("--seeds", sim.seeds, "number of seeds")->capture_default_str();
  sim_cmd->add_option("--first-seed", sim.first_seed, "first seed")->capture_default_str();
  sim_cmd->add_option("--pairing", sim.pairing, "uniform|balanced")->capture_default_str();
  sim_cmd->add_option("--tie-rate", sim.tie_rate, "tie probability")->capture_default_str();
  sim_cmd->add_option("--bothbad-rate", sim.bothbad_rate, "both-bad probability")
      ->capture_default_str();
  sim_cmd->add_option("--noise", sim.noise, "rating jitter std-dev")->capture_default_str();
  sim_cmd->add_option("--threads", sim.threads, "worker threads (0 = all cores)");
  sim_cmd->add_option("--report", sim.report, "per-seed JSONL report path");

  CorrelateOptions cor;
  auto* cor_cmd = app.add_subcommand("correlate", "Pearson correlation of metrics with votes");
  cor_cmd->add_option("--scores", cor.scores, "score records (JSONL)")->required();
  cor_cmd->add_option("--votes", cor.votes, "vote log or bench export")->required();
  cor_cmd->add_option("--subscore", cor.subscores, "semantics|quality|overall (repeatable)");
  cor_cmd->add_option("--task", cor.task, "restrict to one task");
  cor_cmd->add_option("--safety", cor.safety, "safe_only|all")->capture_default_str();
  cor_cmd->add_option("--random-seed", cor.random_seed, "seed of the Random row")
      ->capture_default_str();
  cor_cmd->add_flag("--no-random", cor.no_random, "omit the Random row");
  cor_cmd->add_option("--csv", cor.csv, std::string("long-format CSV output. ") + kCsvNote);

  ExportOptions exp;
  auto* exp_cmd = app.add_subcommand("export", "Write safe counted votes as a bench export");
  exp_cmd->add_option("--votes", exp.votes, "vote log")->required();
  exp_cmd->add_option("--task", exp.task, "task")->required();
  exp_cmd->add_option("--out", exp.out_path, "output path (default stdout)");

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP arena service");
  serve_cmd->add_option("--config", serve.config, "JSON config file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << '\n';
    return kExitBadInput;
  }

  try {
    if (*rank_cmd) return cmd_rank(rank, out, err);
    if (*heat_cmd) return cmd_heatmap(heat, out, err);
    if (*sim_cmd) return cmd_simulate(sim, out, err);
    if (*cor_cmd) return cmd_correlate(cor, out, err);
    if (*exp_cmd) return cmd_export(exp, out, err);
    if (*serve_cmd) return cmd_serve(serve, out, err);
  } catch (const BadInput& e) {
    err << e.what() << '\n';
    return kExitBadInput;
  } catch (const ValidationError& e) {
    err << e.what() << '\n';
    return kExitBadInput;
  } catch (const ParseError& e) {
    err << e.what() << '\n';
    return kExitBadInput;
  } catch (const NotFoundError& e) {
    err << e.what() << '\n';
    return kExitBadInput;
  } catch (const DomainError& e) {
    err << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace arena::cli
