#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treerules/dataset.hpp"

namespace treerules {

// One row of a node table. Ids are 1-based; 0 means "no child".
struct Node {
  std::int32_t left = 0;
  std::int32_t right = 0;
  std::int32_t split_var = 0;  // 1-based predictor index, 0 at leaves
  double split_point = 0.0;    // numeric threshold, or level bitmask for categorical splits
  std::int32_t status = -1;    // -1 leaf, 1 internal
  double pred = 0.0;           // class index or mean at leaves, 0 elsewhere
  double gain = 0.0;           // impurity decrease of the split (not serialized)

  bool leaf() const noexcept { return status == -1; }

  friend bool operator==(const Node& a, const Node& b) {
    return a.left == b.left && a.right == b.right && a.split_var == b.split_var &&
           a.split_point == b.split_point && a.status == b.status && a.pred == b.pred;
  }
};

// Flat binary tree. Node 1 is the root; nodes are numbered in the order
// they were created (breadth-first for trees grown here).
struct NodeTable {
  std::vector<Node> nodes;

  const Node& node(std::int32_t id) const { return nodes.at(static_cast<std::size_t>(id - 1)); }
  std::size_t size() const noexcept { return nodes.size(); }

  friend bool operator==(const NodeTable&, const NodeTable&) = default;
};

struct Ensemble {
  std::vector<NodeTable> trees;
  Schema schema;
  // Out-of-bag error (misclassification rate or MSE) when trees were grown
  // on bootstrap samples.
  std::optional<double> oob_error;

  Task task() const noexcept { return schema.task(); }
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> mtry;        // floor(sqrt(p)) / max(1, floor(p/3)) when unset
  std::optional<std::size_t> min_leaf;    // 1 classification, 5 regression when unset
  std::optional<std::size_t> max_leaves;  // cap on terminal nodes per tree
  std::uint64_t seed = 1;
  // Per-feature penalty coefficients in (0,1]. When non-empty the forest is
  // regularized: a feature outside the shared used-set F has its split gain
  // scaled by its coefficient, and enters F when it wins a split.
  std::vector<double> penalties;
  bool bootstrap = true;    // otherwise every tree sees all rows once
  std::size_t threads = 0;  // 0 = hardware concurrency; regularized builds run serially
};

std::size_t default_mtry(Task task, std::size_t p);
std::size_t default_min_leaf(Task task);

Ensemble build_forest(const Dataset& d, const ForestParams& params);

// A single tree over all features and all rows (baseline learner).
NodeTable build_cart(const Dataset& d, std::size_t min_leaf, std::uint64_t seed = 1);

struct RouteResult {
  std::int32_t leaf = 1;
  double pred = 0.0;
};

// Numeric splits send x <= split_point left; categorical splits send x left
// when bit (level index) of the mask is set. Throws DataError on a
// categorical value outside the schema's levels.
RouteResult route(const NodeTable& tree, const Schema& schema, std::span<const double> x);

// Majority vote (ties to the lower class index) or mean of the trees.
double predict(const Ensemble& e, std::span<const double> x);

// Mean split-gain decrease per feature, scaled so the largest is 1. All
// zeros when no tree has a split.
std::vector<double> importance(const Ensemble& e);

// Indices of features used by at least one split, in order of first use.
std::vector<std::size_t> used_features(const Ensemble& e);

// Throws DataError naming the tree and node on any structural violation.
void validate(const NodeTable& tree, const Schema& schema, std::size_t tree_id = 1);

// Interchange format: CSV with header
//   tree_id,node,left,right,split_var,split_point,status,pred
void write_node_tables(const Ensemble& e, std::ostream& out);
Ensemble read_node_tables(std::istream& in, const Schema& schema);
void export_node_tables(const Ensemble& e, const std::string& path);
Ensemble import_node_tables(const std::string& path, const Schema& schema);

}  // namespace treerules
