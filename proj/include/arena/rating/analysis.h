#ifndef ARENA_RATING_ANALYSIS_H_
#define ARENA_RATING_ANALYSIS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <span>
#include <vector>

#include "arena/rating/types.h"

namespace arena::rating {

// Square model-by-model matrix. Undefined cells are empty optionals.
struct ModelMatrix {
  std::vector<ModelId> models;
  std::vector<std::optional<double>> cells;  // row-major

  std::size_t size() const { return models.size(); }
  const std::optional<double>& at(std::size_t i, std::size_t j) const {
    return cells[i * size() + j];
  }
  std::optional<double>& at(std::size_t i, std::size_t j) {
    return cells[i * size() + j];
  }
  std::optional<double> at(const ModelId& a, const ModelId& b) const;

  // Permutes rows and columns into `order`. Models missing from `order`
  // keep their relative position after the listed ones.
  ModelMatrix reordered(const std::vector<ModelId>& order) const;
};

// Head-to-head win fraction over decisive battles (ties and BothBad are not
// counted). Cells for pairs with no decisive battle are undefined.
ModelMatrix win_fraction_matrix(std::span<const BattleRecord> battles);

// Symmetric battle counts. With include_ties = false, Tie and BothBad
// battles are left out.
ModelMatrix battle_count_matrix(std::span<const BattleRecord> battles,
                                bool include_ties);

// Mean predicted win probability against every other model in the table.
std::map<ModelId, double> average_win_rate(const RatingTable& table,
                                           double alpha);

// CSV with the model ids as header row and first column. Undefined cells
// are empty fields; numbers use 6 significant digits.
void write_matrix_csv(std::ostream& out, const ModelMatrix& matrix);

// model,rating,ci_lower,ci_upper,battles sorted by rating descending.
void write_leaderboard_csv(std::ostream& out, const RatingTable& table);

// model,average_win_rate rows in `order`.
void write_average_win_rate_csv(std::ostream& out, const std::vector<ModelId>& order,
                                const std::map<ModelId, double>& rates);

// printf("%.6g") without locale influence.
std::string format_number(double value);

}  // namespace arena::rating

#endif  // ARENA_RATING_ANALYSIS_H_
