#include "treerules/stel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "treerules/error.hpp"
#include "treerules/text.hpp"

namespace treerules {

namespace {

// Outcome of the default rule over the rows flagged alive.
double default_outcome(const Dataset& d, const std::vector<std::uint8_t>& alive) {
  const auto t = d.target();
  if (d.task() == Task::classification) {
    std::vector<std::size_t> counts(d.schema().target.levels.size(), 0);
    for (std::size_t r = 0; r < t.size(); ++r)
      if (alive[r]) ++counts[static_cast<std::size_t>(t[r])];
    return static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < t.size(); ++r)
    if (alive[r]) {
      sum += t[r];
      ++n;
    }
  return n ? sum / static_cast<double>(n) : 0.0;
}

// Metrics of a rule restricted to the alive rows among `rows`.
RuleMetrics metrics_on(const Dataset& d, std::span<const std::size_t> rows,
                       const std::vector<std::uint8_t>& alive, double outcome, std::size_t len) {
  const auto t = d.target();
  RuleMetrics m;
  m.len = len;
  double wrong = 0.0, sum = 0.0;
  for (auto r : rows)
    if (alive[r]) {
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
    double sq = 0.0;
    for (auto r : rows)
      if (alive[r]) sq += (t[r] - mean) * (t[r] - mean);
    m.err = sq / k;
  }
  return m;
}

bool preferred(const RuleMetrics& a, const RuleMetrics& b) {
  if (a.err != b.err) return a.err < b.err;
  if (a.freq != b.freq) return a.freq > b.freq;
  return a.len < b.len;
}

}  // namespace

RuleList build_stel(std::span<const Rule> rules, const Dataset& d, double freq_threshold) {
  const std::size_t n = d.num_rows();
  if (n == 0) throw std::invalid_argument("cannot build a rule list on an empty dataset");

  struct Candidate {
    const Rule* rule;
    std::vector<std::size_t> rows;
  };
  std::vector<Candidate> candidates;
  for (const auto& r : rules) {
    const auto mask = coverage(r.condition, d);
    Candidate c{&r, {}};
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) c.rows.push_back(i);
    if (static_cast<double>(c.rows.size()) / static_cast<double>(n) >= freq_threshold)
      candidates.push_back(std::move(c));
  }

  std::vector<std::uint8_t> alive(n, 1);
  std::vector<std::size_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;
  std::size_t remaining = n;
  RuleList list;
  while (true) {
    if (remaining == 0) {
      Rule fallback;
      fallback.outcome = default_outcome(d, std::vector<std::uint8_t>(n, 1));
      fallback.metrics.err = std::numeric_limits<double>::quiet_NaN();
      list.rules.push_back(std::move(fallback));
      break;
    }
    Rule default_rule;
    default_rule.outcome = default_outcome(d, alive);
    default_rule.metrics = metrics_on(d, all_rows, alive, default_rule.outcome, 0);

    const Candidate* best = nullptr;
    RuleMetrics best_metrics = default_rule.metrics;
    for (const auto& c : candidates) {
      const auto m = metrics_on(d, c.rows, alive, c.rule->outcome, c.rule->condition.length());
      if (m.covered == 0) continue;
      if (preferred(m, best_metrics)) {
        best = &c;
        best_metrics = m;
      }
    }
    if (!best) {
      list.rules.push_back(std::move(default_rule));
      break;
    }
    Rule chosen = *best->rule;
    chosen.metrics = best_metrics;
    list.rules.push_back(std::move(chosen));
    for (auto r : best->rows)
      if (alive[r]) {
        alive[r] = 0;
        --remaining;
      }
  }
  return list;
}

double predict(const RuleList& list, std::span<const double> x) {
  for (const auto& r : list.rules)
    if (r.condition.satisfied_by(x)) return r.outcome;
  return list.default_rule().outcome;
}

double evaluate(const RuleList& list, const Dataset& d) {
  if (d.num_rows() == 0) throw std::invalid_argument("cannot evaluate on an empty dataset");
  const auto t = d.target();
  double loss = 0.0;
  for (std::size_t r = 0; r < d.num_rows(); ++r) {
    const double guess = predict(list, d.instance(r));
    if (d.task() == Task::classification)
      loss += guess != t[r] ? 1.0 : 0.0;
    else
      loss += (guess - t[r]) * (guess - t[r]);
  }
  return loss / static_cast<double>(d.num_rows());
}

void write_rule_list(const RuleList& list, const Schema& schema, std::ostream& out) {
  out << "position,len,freq,err,condition,pred\n";
  for (std::size_t i = 0; i < list.rules.size(); ++i) {
    const auto& r = list.rules[i];
    out << (i + 1) << ',' << r.metrics.len << ',' << format_number(r.metrics.freq) << ','
        << (std::isnan(r.metrics.err) ? std::string("NA") : format_number(r.metrics.err)) << ','
        << print_condition(r.condition, schema) << ',' << schema.format_outcome(r.outcome) << '\n';
  }
}

RuleList read_rule_list(std::istream& in, const Schema& schema) {
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) break;
  if (trim(line) != "position,len,freq,err,condition,pred")
    throw DataError("rule list: unexpected header '" + std::string(trim(line)) + "'");
  RuleList list;
  while (std::getline(in, line)) {
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto f = split_row(text, 6, 4);
    if (f[0] != std::to_string(list.rules.size() + 1))
      throw DataError("rule list: positions must run 1,2,... in order");
    Rule r;
    r.condition = parse_condition(f[4], schema);
    r.outcome = schema.parse_outcome(f[5]);
    r.metrics.len = r.condition.length();
    auto number = [](const std::string& s) {
      if (s == "NA") return std::numeric_limits<double>::quiet_NaN();
      auto v = parse_number(s);
      if (!v) throw DataError("rule list: bad number '" + s + "'");
      return *v;
    };
    r.metrics.freq = number(f[2]);
    r.metrics.err = number(f[3]);
    list.rules.push_back(std::move(r));
  }
  if (list.rules.empty() || !list.rules.back().condition.empty())
    throw DataError("rule list must end with a TRUE default rule");
  return list;
}

}  // namespace treerules
