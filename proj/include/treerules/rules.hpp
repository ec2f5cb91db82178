#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treerules/condition.hpp"
#include "treerules/dataset.hpp"
#include "treerules/trees.hpp"

namespace treerules {

struct RuleMetrics {
  std::size_t len = 0;
  double freq = 0.0;
  double err = 0.0;          // NaN when nothing is covered
  std::size_t covered = 0;

  bool uncovered() const noexcept { return covered == 0; }
};

struct Rule {
  Condition condition;
  double outcome = 0.0;  // class index or numeric value
  RuleMetrics metrics;
};

struct RuleSet {
  std::vector<Rule> rules;
  std::string provenance;
  std::vector<std::string> warnings;
};

// One rule per leaf of every tree: the conjunction of branch predicates on
// the root-to-leaf path (left child: node predicate, right child: its
// complement), canonicalized, with the leaf prediction as outcome. Paths
// whose terms cannot all hold are dropped with a warning. Metrics are left
// unset; measure against a dataset when needed.
RuleSet extract_rules(const Ensemble& e);

// (leaf id, canonical path condition) for every leaf of one tree whose path
// is satisfiable.
std::vector<std::pair<std::int32_t, Condition>> leaf_conditions(const NodeTable& tree,
                                                                const Schema& schema);

// Path conditions collected at leaves, and at nodes of depth max_depth
// (root depth 1) without descending further. max_depth -1: no limit.
std::vector<Condition> extract_conditions(const Ensemble& e, int max_depth,
                                          std::vector<std::string>* warnings = nullptr);

// Canonical-form dedup keeping the first occurrence.
std::vector<Condition> dedup(std::vector<Condition> conditions);

// Covered rows, and len/freq/err of a rule with the given outcome on d.
RuleMetrics measure(const Condition& c, double outcome, const Dataset& d);
RuleMetrics measure(const Rule& r, const Dataset& d);

// Majority class (ties: earlier level) or mean target of the covered rows,
// with metrics. nullopt when no row satisfies the condition.
std::optional<Rule> assign_outcome(const Condition& c, const Dataset& d);

struct Assignment {
  std::vector<Rule> rules;
  std::vector<std::size_t> uncovered;  // indices into the input conditions
};
Assignment assign_outcomes(std::span<const Condition> conditions, const Dataset& d);

enum class RankKey { err_asc, freq_desc, len_asc };

// Stable lexicographic sort by the given keys.
std::vector<Rule> rank_rules(std::vector<Rule> rules, std::span<const RankKey> keys);

// Rule table CSV: len,freq,err,condition,pred. The condition column is
// read back by position, so it may contain commas.
void write_rule_table(std::span<const Rule> rules, const Schema& schema, std::ostream& out,
                      Naming naming = Naming::indexed);
std::vector<Rule> read_rule_table(std::istream& in, const Schema& schema);

// Condition list CSV: a single `condition` column.
void write_conditions(std::span<const Condition> conditions, const Schema& schema, std::ostream& out);
std::vector<Condition> read_conditions(std::istream& in, const Schema& schema);

// Splits a CSV row whose column `free` may itself contain commas; every
// other column must not.
std::vector<std::string> split_row(std::string_view line, std::size_t columns, std::size_t free);

}  // namespace treerules
