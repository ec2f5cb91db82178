#include "treerules/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "treerules/text.hpp"

namespace treerules {

std::string pretty_number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s == "-0" ? "0" : s;
}

namespace {

std::string number(double v) { return pretty_number(v); }

std::string readable(const Condition& c, const Schema& schema) {
  return c.empty() ? "Else" : print_condition(c, schema, Naming::column);
}

}  // namespace

void print_aligned(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows, std::ostream& out) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
  for (const auto& row : rows)
    for (std::size_t j = 0; j < row.size() && j < width.size(); ++j)
      width[j] = std::max(width[j], row[j].size());

  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j) s += "  ";
      s += cells[j];
      if (j + 1 < cells.size()) s.append(width[j] - cells[j].size(), ' ');
    }
    out << s << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') << '\n';
  for (const auto& row : rows) line(row);
}

void report_rules(std::span<const Rule> rules, const Schema& schema, Format format, std::ostream& out) {
  if (format == Format::csv) return write_rule_table(rules, schema, out);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : rules)
    rows.push_back({std::to_string(r.metrics.len), number(r.metrics.freq), number(r.metrics.err),
                    readable(r.condition, schema), schema.format_outcome(r.outcome)});
  print_aligned({"len", "freq", "err", "condition", "pred"}, rows, out);
}

void report_selected(std::span<const Rule> rules, std::span<const double> scores, const Schema& schema,
                     Format format, std::ostream& out) {
  const bool pretty = format == Format::pretty;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    auto num = [&](double v) { return pretty ? number(v) : (std::isnan(v) ? "NA" : format_number(v)); };
    rows.push_back({std::to_string(r.metrics.len), num(r.metrics.freq), num(r.metrics.err),
                    pretty ? readable(r.condition, schema) : print_condition(r.condition, schema),
                    schema.format_outcome(r.outcome), num(scores[i])});
  }
  const std::vector<std::string> header{"len", "freq", "err", "condition", "pred", "score"};
  if (pretty) return print_aligned(header, rows, out);
  out << join(header, ",") << '\n';
  for (const auto& row : rows) out << join(row, ",") << '\n';
}

void report_rule_list(const RuleList& list, const Schema& schema, Format format, std::ostream& out) {
  if (format == Format::csv) return write_rule_list(list, schema, out);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < list.rules.size(); ++i) {
    const auto& r = list.rules[i];
    rows.push_back({std::to_string(i + 1), std::to_string(r.metrics.len), number(r.metrics.freq),
                    number(r.metrics.err), readable(r.condition, schema), schema.format_outcome(r.outcome)});
  }
  print_aligned({"position", "len", "freq", "err", "condition", "pred"}, rows, out);
}

void report_interactions(std::span<const AssociationRule> rules, const Schema& schema, Format format,
                         std::ostream& out) {
  if (format == Format::csv) return write_interaction_table(rules, schema, out);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : rules)
    rows.push_back({std::to_string(r.lhs.size()), number(r.support), number(r.confidence),
                    print_items(r.lhs, schema, Naming::column), schema.format_outcome(r.rhs.outcome)});
  print_aligned({"len", "sup", "conf", "condition", "pred"}, rows, out);
}

}  // namespace treerules
