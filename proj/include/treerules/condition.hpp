#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treerules/dataset.hpp"

namespace treerules {

// Operators in canonical order: a variable's set term sorts before its
// interval terms, and the upper bound before the lower bound.
enum class Op : std::uint8_t { in_set = 0, le = 1, gt = 2 };

// One variable-value pair. `var` is the 0-based predictor index; set terms
// keep the admitted levels as a bitmask over the schema's level order.
struct Term {
  std::size_t var = 0;
  Op op = Op::le;
  double threshold = 0.0;
  std::uint32_t levels = 0;

  bool satisfied_by(double value) const noexcept;

  static Term in(std::size_t var, std::uint32_t levels) { return {var, Op::in_set, 0.0, levels}; }
  static Term le(std::size_t var, double threshold) { return {var, Op::le, threshold, 0}; }
  static Term gt(std::size_t var, double threshold) { return {var, Op::gt, threshold, 0}; }

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);
};

// Conjunction of terms; no terms means "always true".
struct Condition {
  std::vector<Term> terms;

  std::size_t length() const noexcept { return terms.size(); }
  bool empty() const noexcept { return terms.empty(); }
  bool satisfied_by(std::span<const double> x) const noexcept;

  friend bool operator==(const Condition&, const Condition&) = default;
  friend auto operator<=>(const Condition& a, const Condition& b) { return a.terms <=> b.terms; }
};

// Sorts terms by (variable, operator), intersects same-variable intervals
// and level sets, and drops set terms that admit every level. nullopt when
// the conjunction can never hold.
std::optional<Condition> canonicalize(const Condition& c, const Schema& schema);

// The complementary branch predicate of a tree split (right child).
Term complement(const Term& t, const Schema& schema);

// One byte per row: 1 when the row satisfies the condition.
std::vector<std::uint8_t> coverage(const Condition& c, const Dataset& d);
std::size_t count_covered(const Condition& c, const Dataset& d);

enum class Naming {
  indexed,  // X1, X2, ... (the interchange grammar)
  column    // schema column names, for display
};

// Grammar:
//   condition := term (" & " term)* | "TRUE"
//   term      := var " in " "{" token ("," token)* "}" | var " <= " number | var " > " number
//   var       := "X" positive-integer
std::string print_condition(const Condition& c, const Schema& schema, Naming naming = Naming::indexed);

// Parses and canonicalizes. Throws ParseError with a byte offset on syntax
// errors, unknown variables or levels, and operator/type mismatches.
Condition parse_condition(std::string_view text, const Schema& schema);

}  // namespace treerules
