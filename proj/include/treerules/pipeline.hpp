#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "treerules/interactions.hpp"
#include "treerules/pruning.hpp"
#include "treerules/rules.hpp"
#include "treerules/selection.hpp"
#include "treerules/stel.hpp"
#include "treerules/trees.hpp"

namespace treerules {

struct PipelineConfig {
  ForestParams forest;
  int max_depth = 6;
  std::size_t max_conditions = 2000;  // uniform sample above this; 0 = keep all
  PruneParams prune;
  SelectionParams selection;
  MiningParams mining;
  double stel_threshold = 0.01;
  std::uint64_t seed = 1;
};

// Every intermediate product of one pass over a training set.
struct PipelineResult {
  Ensemble forest;
  std::vector<Condition> extracted;  // after the optional cap
  std::vector<Condition> unique;
  std::vector<Rule> rules;           // outcomes assigned on the training data
  std::vector<Rule> pruned;          // pruned, then deduplicated by condition
  Selection selection;               // over the pruned conditions
  std::vector<Rule> selected;
  RuleList stel;                     // built from the pruned rules
};

// The forest seed, the cap sample and the selection forest all derive from
// config.seed.
PipelineResult run_pipeline(const Dataset& train, const PipelineConfig& config,
                            bool with_selection = true);

// Uniform sample of `cap` conditions without replacement, kept in extraction order.
std::vector<Condition> sample_conditions(std::vector<Condition> conditions, std::size_t cap,
                                         std::uint64_t seed);

// Drops later rules whose condition repeats an earlier one.
std::vector<Rule> dedup_rules(std::vector<Rule> rules);

struct BenchConfig {
  PipelineConfig pipeline;
  std::size_t runs = 10;
  double train_fraction = 2.0 / 3.0;
  std::size_t cart_min_leaf = 7;
  std::size_t threads = 0;  // concurrent repetitions; 0 = hardware concurrency
};

struct BenchRun {
  std::uint64_t seed = 0;
  double stel_error = 0.0;
  double cart_error = 0.0;
  std::size_t stel_rules = 0;
};

struct BenchResult {
  std::vector<BenchRun> runs;
  double stel_mean = 0.0;
  double cart_mean = 0.0;
  double relative_difference = 0.0;  // (larger - lower) / larger
  double t_statistic = 0.0;          // paired, STEL minus CART
  double seconds = 0.0;
};

BenchResult run_bench(const Dataset& d, const BenchConfig& config);

double relative_difference(double a, double b);
double paired_t(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace treerules
