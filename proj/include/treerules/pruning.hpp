#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "treerules/rules.hpp"

namespace treerules {

enum class DecayMode {
  relative,  // (E_without - E) / max(E, s)
  absolute   // E_without - E
};

// Error E of a condition evaluated with a fixed outcome. Smaller is better
// and E >= 0.
using RuleErrorFn = std::function<double(const Condition&, double outcome)>;

struct PruneParams {
  DecayMode mode = DecayMode::relative;
  double threshold = 0.05;
  double s = 1e-6;
  // Rule error on the pruning dataset when empty.
  RuleErrorFn error;
};

double decay_value(double error, double error_without, const PruneParams& params);

// Decay of dropping term `term` (0-based) from r's condition.
double decay(const Rule& r, std::size_t term, const Dataset& d, const PruneParams& params);

struct PruneStep {
  std::size_t term = 0;  // index in the original condition
  Term removed_term;
  double error = 0.0;          // E of the condition before this step
  double error_without = 0.0;  // E with the term left out
  double decay = 0.0;
  bool removed = false;
};

struct PruneResult {
  Rule rule;
  std::vector<PruneStep> steps;
};

// Leave-one-out pruning from the last term to the first. Each decay is
// taken against the condition as shortened so far; a term goes when its
// decay is below the threshold, but the last remaining term always stays.
// The outcome is kept and the metrics are re-measured on d at the end.
PruneResult prune_rule_traced(const Rule& r, const Dataset& d, const PruneParams& params);
Rule prune_rule(const Rule& r, const Dataset& d, const PruneParams& params);
std::vector<Rule> prune_rules(std::span<const Rule> rules, const Dataset& d, const PruneParams& params);

}  // namespace treerules
