#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "treerules/interactions.hpp"
#include "treerules/rules.hpp"
#include "treerules/stel.hpp"

namespace treerules {

// csv: the interchange formats of the owning modules.
// pretty: aligned columns, column names instead of X<k>, "Else" for the
// default rule of a rule list.
enum class Format { csv, pretty };

void report_rules(std::span<const Rule> rules, const Schema& schema, Format format, std::ostream& out);
// Rule table plus a trailing score column.
void report_selected(std::span<const Rule> rules, std::span<const double> scores, const Schema& schema,
                     Format format, std::ostream& out);
void report_rule_list(const RuleList& list, const Schema& schema, Format format, std::ostream& out);
void report_interactions(std::span<const AssociationRule> rules, const Schema& schema, Format format,
                         std::ostream& out);

// Three decimals, trailing zeros dropped, NaN as "NA".
std::string pretty_number(double v);

// Left-aligned text table with a rule under the header.
void print_aligned(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows, std::ostream& out);

}  // namespace treerules
