#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "treerules/condition.hpp"
#include "treerules/dataset.hpp"
#include "treerules/trees.hpp"

namespace treerules {

// Binary instance-by-condition satisfaction matrix plus the target.
struct IndicatorDataset {
  std::vector<std::vector<std::uint8_t>> columns;  // one per condition, n entries each
  ColumnSchema target_schema;
  std::vector<double> target;

  std::size_t num_rows() const noexcept { return target.size(); }
  std::size_t num_columns() const noexcept { return columns.size(); }
  bool constant(std::size_t column) const;

  // Numeric 0/1 predictors C1..CJ for the given columns (all when empty).
  Dataset to_dataset(std::span<const std::size_t> columns = {}) const;
};

IndicatorDataset indicator_matrix(std::span<const Condition> conditions, const Dataset& d);

struct SelectionParams {
  double lambda0 = 1.0;  // base coefficient, (0,1]
  double gamma = 0.1;    // weight of the length penalty, [0,1]
  double beta = 0.0;     // weight of global importance, [0,1]
  // Guided forest over the indicator columns. mtry unset: every column is a
  // split candidate at every node.
  ForestParams forest = default_forest();
  bool rescore = true;

  static ForestParams default_forest() {
    ForestParams f;
    f.n_trees = 50;
    return f;
  }
};

// lambda_i = lambda0 * (1 - gamma * l_i / l_max + beta * imp_i), kept
// inside (0,1]. importances are required when beta > 0.
std::vector<double> complexity_lambdas(std::span<const Condition> conditions,
                                       const SelectionParams& params,
                                       std::span<const double> importances = {});

struct Selection {
  std::vector<std::size_t> indices;  // into the input conditions, by score desc
  std::vector<Condition> conditions;
  std::vector<double> scores;
  std::uint64_t seed = 0;
};

// Conditions whose indicator columns enter the used-feature set of a forest
// regularized by complexity_lambdas. Constant columns never qualify.
Selection select_conditions(std::span<const Condition> conditions, const Dataset& d,
                            const SelectionParams& params);

}  // namespace treerules
