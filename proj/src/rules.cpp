#include "treerules/rules.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <set>

#include "treerules/error.hpp"
#include "treerules/text.hpp"

namespace treerules {

namespace {

struct Walker {
  const NodeTable& tree;
  const Schema& schema;
  int max_depth;
  std::vector<std::pair<std::int32_t, Condition>>& out;
  std::size_t dropped = 0;
  std::vector<Term> path;

  void walk(std::int32_t id, int depth) {
    const Node& node = tree.node(id);
    if (node.leaf() || depth == max_depth) {
      if (auto c = canonicalize(Condition{path}, schema))
        out.emplace_back(id, std::move(*c));
      else
        ++dropped;
      return;
    }
    const auto var = static_cast<std::size_t>(node.split_var - 1);
    const Term left = schema.predictors[var].categorical()
                          ? Term::in(var, static_cast<std::uint32_t>(node.split_point))
                          : Term::le(var, node.split_point);
    path.push_back(left);
    walk(node.left, depth + 1);
    path.back() = complement(left, schema);
    walk(node.right, depth + 1);
    path.pop_back();
  }
};

std::vector<std::pair<std::int32_t, Condition>> tree_conditions(const NodeTable& tree,
                                                                const Schema& schema, int max_depth,
                                                                std::size_t tree_index,
                                                                std::vector<std::string>* warnings) {
  std::vector<std::pair<std::int32_t, Condition>> out;
  Walker w{tree, schema, max_depth, out, 0, {}};
  w.walk(1, 1);
  if (w.dropped && warnings)
    warnings->push_back("tree " + std::to_string(tree_index + 1) + ": dropped " +
                        std::to_string(w.dropped) + " path(s) with contradictory terms");
  return out;
}

void check_header(std::istream& in, std::string_view expected, std::string& line) {
  while (std::getline(in, line))
    if (!trim(line).empty()) break;
  if (trim(line) != expected)
    throw DataError("expected header '" + std::string(expected) + "', got '" +
                    std::string(trim(line)) + "'");
}

double parse_field(std::string_view text, const char* what) {
  if (text == "NA") return std::numeric_limits<double>::quiet_NaN();
  auto v = parse_number(text);
  if (!v) throw DataError(std::string("bad ") + what + " '" + std::string(text) + "'");
  return *v;
}

}  // namespace

std::vector<std::pair<std::int32_t, Condition>> leaf_conditions(const NodeTable& tree,
                                                                const Schema& schema) {
  return tree_conditions(tree, schema, -1, 0, nullptr);
}

RuleSet extract_rules(const Ensemble& e) {
  RuleSet rs;
  rs.provenance = "rules from " + std::to_string(e.trees.size()) + " trees";
  for (std::size_t t = 0; t < e.trees.size(); ++t) {
    for (auto& [leaf, c] : tree_conditions(e.trees[t], e.schema, -1, t, &rs.warnings)) {
      Rule r;
      r.outcome = e.trees[t].node(leaf).pred;
      r.metrics.len = c.length();
      r.condition = std::move(c);
      rs.rules.push_back(std::move(r));
    }
  }
  return rs;
}

std::vector<Condition> extract_conditions(const Ensemble& e, int max_depth,
                                          std::vector<std::string>* warnings) {
  if (max_depth != -1 && max_depth < 1)
    throw std::invalid_argument("max_depth must be -1 or at least 1");
  std::vector<Condition> out;
  for (std::size_t t = 0; t < e.trees.size(); ++t)
    for (auto& [leaf, c] : tree_conditions(e.trees[t], e.schema, max_depth, t, warnings))
      out.push_back(std::move(c));
  return out;
}

std::vector<Condition> dedup(std::vector<Condition> conditions) {
  std::set<Condition> seen;
  std::vector<Condition> out;
  for (auto& c : conditions)
    if (seen.insert(c).second) out.push_back(std::move(c));
  return out;
}

RuleMetrics measure(const Condition& c, double outcome, const Dataset& d) {
  if (d.num_rows() == 0) throw std::invalid_argument("cannot measure on an empty dataset");
  const auto mask = coverage(c, d);
  const auto t = d.target();
  RuleMetrics m;
  m.len = c.length();
  double wrong = 0.0, sum = 0.0, sum_sq = 0.0;
  for (std::size_t r = 0; r < mask.size(); ++r) {
    if (!mask[r]) continue;
    ++m.covered;
    wrong += t[r] != outcome ? 1.0 : 0.0;
    sum += t[r];
  }
  m.freq = static_cast<double>(m.covered) / static_cast<double>(d.num_rows());
  if (m.covered == 0) {
    m.err = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  const double k = static_cast<double>(m.covered);
  if (d.task() == Task::classification) {
    m.err = wrong / k;
  } else {
    const double mean = sum / k;
    for (std::size_t r = 0; r < mask.size(); ++r)
      if (mask[r]) sum_sq += (t[r] - mean) * (t[r] - mean);
    m.err = sum_sq / k;
  }
  return m;
}

RuleMetrics measure(const Rule& r, const Dataset& d) { return measure(r.condition, r.outcome, d); }

std::optional<Rule> assign_outcome(const Condition& c, const Dataset& d) {
  if (d.num_rows() == 0) throw std::invalid_argument("cannot assign outcomes on an empty dataset");
  const auto mask = coverage(c, d);
  const auto t = d.target();
  Rule rule;
  rule.condition = c;
  if (d.task() == Task::classification) {
    std::vector<std::size_t> counts(d.schema().target.levels.size(), 0);
    std::size_t covered = 0;
    for (std::size_t r = 0; r < mask.size(); ++r)
      if (mask[r]) {
        ++counts[static_cast<std::size_t>(t[r])];
        ++covered;
      }
    if (covered == 0) return std::nullopt;
    rule.outcome = static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  } else {
    double sum = 0.0;
    std::size_t covered = 0;
    for (std::size_t r = 0; r < mask.size(); ++r)
      if (mask[r]) {
        sum += t[r];
        ++covered;
      }
    if (covered == 0) return std::nullopt;
    rule.outcome = sum / static_cast<double>(covered);
  }
  rule.metrics = measure(rule, d);
  return rule;
}

Assignment assign_outcomes(std::span<const Condition> conditions, const Dataset& d) {
  Assignment a;
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    if (auto r = assign_outcome(conditions[i], d))
      a.rules.push_back(std::move(*r));
    else
      a.uncovered.push_back(i);
  }
  return a;
}

std::vector<Rule> rank_rules(std::vector<Rule> rules, std::span<const RankKey> keys) {
  std::stable_sort(rules.begin(), rules.end(), [&](const Rule& a, const Rule& b) {
    for (auto key : keys) {
      const auto& x = a.metrics;
      const auto& y = b.metrics;
      switch (key) {
        case RankKey::err_asc:
          if (x.err != y.err) return x.err < y.err;
          break;
        case RankKey::freq_desc:
          if (x.freq != y.freq) return x.freq > y.freq;
          break;
        case RankKey::len_asc:
          if (x.len != y.len) return x.len < y.len;
          break;
      }
    }
    return false;
  });
  return rules;
}

std::vector<std::string> split_row(std::string_view line, std::size_t columns, std::size_t free) {
  const auto parts = split(line, ',');
  if (parts.size() < columns)
    throw DataError("expected " + std::to_string(columns) + " columns in '" + std::string(line) + "'");
  const std::size_t after = columns - free - 1;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < free; ++i) out.emplace_back(trim(parts[i]));
  std::string middle;
  for (std::size_t i = free; i < parts.size() - after; ++i) {
    if (i > free) middle += ',';
    middle += parts[i];
  }
  out.push_back(std::move(middle));
  for (std::size_t i = parts.size() - after; i < parts.size(); ++i) out.emplace_back(trim(parts[i]));
  return out;
}

void write_rule_table(std::span<const Rule> rules, const Schema& schema, std::ostream& out,
                      Naming naming) {
  out << "len,freq,err,condition,pred\n";
  for (const auto& r : rules) {
    out << r.metrics.len << ',' << format_number(r.metrics.freq) << ','
        << (std::isnan(r.metrics.err) ? std::string("NA") : format_number(r.metrics.err)) << ','
        << print_condition(r.condition, schema, naming) << ',' << schema.format_outcome(r.outcome)
        << '\n';
  }
}

std::vector<Rule> read_rule_table(std::istream& in, const Schema& schema) {
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) break;
  // Selected-rule tables carry a trailing score column, which is ignored.
  const bool scored = trim(line) == "len,freq,err,condition,pred,score";
  if (!scored && trim(line) != "len,freq,err,condition,pred")
    throw DataError("expected header 'len,freq,err,condition,pred', got '" + std::string(trim(line)) + "'");
  std::vector<Rule> rules;
  while (std::getline(in, line)) {
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto f = split_row(text, scored ? 6 : 5, 3);
    Rule r;
    r.condition = parse_condition(f[3], schema);
    r.outcome = schema.parse_outcome(f[4]);
    r.metrics.len = r.condition.length();
    r.metrics.freq = parse_field(f[1], "freq");
    r.metrics.err = parse_field(f[2], "err");
    rules.push_back(std::move(r));
  }
  return rules;
}

void write_conditions(std::span<const Condition> conditions, const Schema& schema, std::ostream& out) {
  out << "condition\n";
  for (const auto& c : conditions) out << print_condition(c, schema) << '\n';
}

std::vector<Condition> read_conditions(std::istream& in, const Schema& schema) {
  std::string line;
  check_header(in, "condition", line);
  std::vector<Condition> out;
  while (std::getline(in, line)) {
    const auto text = trim(line);
    if (!text.empty()) out.push_back(parse_condition(text, schema));
  }
  return out;
}

}  // namespace treerules
