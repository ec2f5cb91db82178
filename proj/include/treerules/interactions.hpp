#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "treerules/rules.hpp"

namespace treerules {

// A variable-value pair, a bare variable, or the target-value pair.
struct Item {
  enum class Kind : std::uint8_t { term = 0, variable = 1, target = 2 };

  Kind kind = Kind::term;
  Term term;             // kind == term; for kind == variable only term.var is used
  double outcome = 0.0;  // kind == target

  static Item of_term(const Term& t) { return {Kind::term, t, 0.0}; }
  static Item of_variable(std::size_t var) { return {Kind::variable, Term{var, Op::in_set, 0.0, 0}, 0.0}; }
  static Item of_target(double outcome) { return {Kind::target, Term{}, outcome}; }

  friend bool operator==(const Item&, const Item&) = default;
  friend std::strong_ordering operator<=>(const Item& a, const Item& b);
};

// Items sorted; the single target item sorts last.
struct Transaction {
  std::vector<Item> items;
};

// One transaction per rule. With numeric_as_variable, terms on numeric
// predictors become bare-variable items (one per variable).
std::vector<Transaction> itemize(std::span<const Rule> rules, const Schema& schema,
                                 bool numeric_as_variable = false);

struct AssociationRule {
  std::vector<Item> lhs;  // sorted, non-target
  Item rhs;               // target item
  double support = 0.0;   // share of transactions containing lhs
  double confidence = 0.0;
  std::size_t count = 0;  // transactions containing lhs

  std::size_t length() const noexcept { return lhs.size() + 1; }
};

struct MiningParams {
  double min_support = 0.01;
  double min_confidence = 0.5;
  std::size_t max_length = 3;  // items including the target
};

// Level-wise (Apriori) enumeration of frequent non-target itemsets with up
// to max_length - 1 items, each paired with every target value reaching
// the confidence threshold. Exact counts, no sampling.
std::vector<AssociationRule> mine(std::span<const Transaction> transactions, const MiningParams& params);

enum class InteractionKey { support_desc, confidence_desc, length_desc };

std::vector<AssociationRule> rank_interactions(std::vector<AssociationRule> rules,
                                               std::span<const InteractionKey> keys);

std::string print_items(std::span<const Item> items, const Schema& schema,
                        Naming naming = Naming::indexed);

// Interaction table CSV: len,sup,conf,condition,pred where len is the
// number of variable-value pairs in the condition.
void write_interaction_table(std::span<const AssociationRule> rules, const Schema& schema,
                             std::ostream& out, Naming naming = Naming::indexed);

}  // namespace treerules
