// Regenerates the shipped imbalance fixture.
//
//   arena_fixtures --out data/fixtures/imbalance_bench.jsonl
//   arena_fixtures --search 200   # list seeds that reproduce the effect
#include <cstdint>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "arena/rating/analysis.h"
#include "arena/simulator/simulator.h"

int main(int argc, char** argv) {
  CLI::App app{"Regenerate simulator fixtures"};
  std::string out_path;
  std::uint64_t seed = arena::simulator::kImbalanceSeed;
  std::uint64_t search = 0;
  app.add_option("--out", out_path, "bench export to write");
  app.add_option("--seed", seed, "simulation seed")->capture_default_str();
  app.add_option("--search", search, "scan seeds [0, N) and report reproducing ones");
  CLI11_PARSE(app, argc, argv);

  namespace sim = arena::simulator;
  const arena::rating::RatingConfig config;
  if (search > 0) {
    for (std::uint64_t s = 0; s < search; ++s) {
      const auto check = sim::check_imbalance(sim::imbalance_battles(s), config);
      if (check.reproduces())
        std::cout << "seed " << s << ": " << check.top << " over " << check.runner_up
                  << " by " << arena::rating::format_number(check.rating_gap)
                  << ", head-to-head " << arena::rating::format_number(*check.head_to_head)
                  << '\n';
    }
    return 0;
  }
  const auto battles = sim::imbalance_battles(seed);
  const auto check = sim::check_imbalance(battles, config);
  std::cerr << check.top << " over " << check.runner_up << " by "
            << arena::rating::format_number(check.rating_gap) << ", head-to-head "
            << (check.head_to_head ? arena::rating::format_number(*check.head_to_head) : "n/a")
            << (check.reproduces() ? "" : " (does not reproduce)") << '\n';
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    sim::write_battles_as_bench(battles, arena::Task::kTextToImage, out);
  }
  return check.reproduces() ? 0 : 1;
}
