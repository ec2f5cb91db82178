#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "treerules/rules.hpp"

namespace treerules {

// Ordered first-match rule list. The last rule has an empty condition (the
// default rule). Rule metrics are the ones measured on the remaining
// training rows when the rule was selected; freq is relative to all rows.
struct RuleList {
  std::vector<Rule> rules;

  const Rule& default_rule() const { return rules.back(); }
};

// Sequential covering over rules with freq >= freq_threshold on d. Each
// round picks the rule with the lowest error on the uncovered rows (ties:
// higher coverage, then shorter, then input order), drops the rows it
// covers, and stops as soon as the default rule of the remaining rows is
// at least as good. Outcomes of the input rules are kept as given.
RuleList build_stel(std::span<const Rule> rules, const Dataset& d, double freq_threshold = 0.01);

// Outcome of the first rule whose condition holds for x.
double predict(const RuleList& list, std::span<const double> x);

// Misclassification rate or mean squared error on d.
double evaluate(const RuleList& list, const Dataset& d);

// position,len,freq,err,condition,pred with the default row as "TRUE".
void write_rule_list(const RuleList& list, const Schema& schema, std::ostream& out);
RuleList read_rule_list(std::istream& in, const Schema& schema);

}  // namespace treerules
