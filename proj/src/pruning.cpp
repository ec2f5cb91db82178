#include "treerules/pruning.hpp"

#include <algorithm>
#include <stdexcept>

namespace treerules {

namespace {

void check(const PruneParams& p) {
  if (!(p.s > 0.0)) throw std::invalid_argument("s must be positive");
  if (!(p.threshold >= 0.0)) throw std::invalid_argument("decay threshold must be non-negative");
}

RuleErrorFn error_fn(const Dataset& d, const PruneParams& p) {
  if (p.error) return p.error;
  return [&d](const Condition& c, double outcome) { return measure(c, outcome, d).err; };
}

Condition without(const Condition& c, std::size_t term) {
  Condition out = c;
  out.terms.erase(out.terms.begin() + static_cast<std::ptrdiff_t>(term));
  return out;
}

}  // namespace

double decay_value(double error, double error_without, const PruneParams& params) {
  if (params.mode == DecayMode::absolute) return error_without - error;
  return (error_without - error) / std::max(error, params.s);
}

double decay(const Rule& r, std::size_t term, const Dataset& d, const PruneParams& params) {
  check(params);
  if (r.condition.empty()) throw std::invalid_argument("decay of a rule without terms");
  if (term >= r.condition.length()) throw std::out_of_range("term index out of range");
  const auto e = error_fn(d, params);
  return decay_value(e(r.condition, r.outcome), e(without(r.condition, term), r.outcome), params);
}

PruneResult prune_rule_traced(const Rule& r, const Dataset& d, const PruneParams& params) {
  check(params);
  const auto e = error_fn(d, params);
  PruneResult result;
  Condition current = r.condition;
  if (!current.empty()) {
    double error = e(current, r.outcome);
    for (std::size_t i = current.length(); i-- > 0;) {
      if (current.length() == 1) break;
      Condition shorter = without(current, i);
      const double error_without = e(shorter, r.outcome);
      PruneStep step{i, current.terms[i], error, error_without,
                     decay_value(error, error_without, params), false};
      step.removed = step.decay < params.threshold;
      if (step.removed) {
        current = std::move(shorter);
        error = error_without;
      }
      result.steps.push_back(step);
    }
  }
  result.rule.condition = std::move(current);
  result.rule.outcome = r.outcome;
  result.rule.metrics = measure(result.rule, d);
  return result;
}

Rule prune_rule(const Rule& r, const Dataset& d, const PruneParams& params) {
  return prune_rule_traced(r, d, params).rule;
}

std::vector<Rule> prune_rules(std::span<const Rule> rules, const Dataset& d, const PruneParams& params) {
  std::vector<Rule> out;
  out.reserve(rules.size());
  for (const auto& r : rules) out.push_back(prune_rule(r, d, params));
  return out;
}

}  // namespace treerules
