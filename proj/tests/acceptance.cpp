// Acceptance report: one PASS/FAIL line per primary criterion.
//
//   acceptance                 exit status 1 when any line fails
//   acceptance --report-only   always exit 0 (used under ctest)

#include <CLI11.hpp>

#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "support.hpp"
#include "treerules/pipeline.hpp"
#include "treerules/text.hpp"

using namespace treerules;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string num(double v) { return format_number(v); }

struct Line {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Both terms on players 1 and 2, one single-level set each.
bool is_player_pair(const Condition& c) {
  return c.length() == 2 && c.terms[0].var == 0 && c.terms[1].var == 1 && c.terms[0].op == Op::in_set &&
         c.terms[1].op == Op::in_set && std::has_single_bit(c.terms[0].levels) &&
         std::has_single_bit(c.terms[1].levels);
}

PipelineConfig team_config(std::uint64_t seed) {
  PipelineConfig config;
  config.seed = seed;
  config.max_conditions = 0;
  config.forest.penalties.assign(20, 0.8);
  return config;
}

Line team_pipeline() {
  Line line{"team pipeline selects the four two-player conditions"};
  const auto start = Clock::now();
  const auto d = testing::team();
  const auto result = run_pipeline(d, team_config(1));
  const double elapsed = seconds_since(start);

  std::set<Condition> seen;
  bool all_pairs = true, clean = true, in_range = true;
  double total = 0.0;
  std::ostringstream freqs;
  for (const auto& r : result.selected) {
    all_pairs = all_pairs && is_player_pair(r.condition);
    seen.insert(r.condition);
    clean = clean && r.metrics.err == 0.0;
    in_range = in_range && r.metrics.freq >= 0.15 && r.metrics.freq <= 0.35;
    total += r.metrics.freq;
    freqs << (freqs.tellp() ? " " : "") << num(r.metrics.freq);
  }
  line.pass = result.selected.size() == 4 && seen.size() == 4 && all_pairs && clean && in_range &&
              std::abs(total - 1.0) <= 1e-9 && elapsed < 30.0;
  line.detail = "extracted " + std::to_string(result.extracted.size()) + ", unique " +
                std::to_string(result.unique.size()) + ", pruned " + std::to_string(result.pruned.size()) +
                ", selected " + std::to_string(result.selected.size()) + " freq [" + freqs.str() + "] sum " +
                num(total) + ", " + num(std::round(elapsed * 100) / 100) + " s";
  return line;
}

// Two win rules over players 1 and 2, then the default lose; no training error.
bool three_rule_list(const Dataset& d, const RuleList& list) {
  const auto& s = d.schema();
  return list.rules.size() == 3 && is_player_pair(list.rules[0].condition) &&
         is_player_pair(list.rules[1].condition) && s.format_outcome(list.rules[0].outcome) == "win" &&
         s.format_outcome(list.rules[1].outcome) == "win" && list.rules[2].condition.empty() &&
         s.format_outcome(list.rules[2].outcome) == "lose" && evaluate(list, d) == 0.0;
}

Line team_stel() {
  Line line{"team rule list has three rules over 20 seeds"};
  const auto d = testing::team();
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) ok += three_rule_list(d, run_pipeline(d, team_config(seed), false).stel);

  // Information only: the same check when the generated data varies.
  int data_ok = 0;
  for (std::uint64_t data_seed = 1; data_seed <= 20; ++data_seed) {
    const auto other = generate_team_data(100, 20, 10, data_seed);
    data_ok += three_rule_list(other, run_pipeline(other, team_config(1), false).stel);
  }
  line.pass = ok >= 19;
  line.detail = std::to_string(ok) + "/20 forest seeds (info: " + std::to_string(data_ok) +
                "/20 when the data seed varies instead)";
  return line;
}

Line pruning_walkthrough() {
  Line line{"pruning walkthrough with stubbed errors"};
  CsvOptions o;
  for (const char* name : {"X1", "X2", "X3"}) o.kinds[name] = ColumnKind::categorical;
  const auto d = testing::csv("X1,X2,X3,T\n0,1,0,true\n1,0,1,false\n", o);
  const auto& s = d.schema();
  Rule r;
  r.condition = parse_condition("X1 in {0} & X2 in {1} & X3 in {0}", s);
  r.outcome = s.parse_outcome("true");
  const std::map<std::string, double> stub{{"X1 in {0} & X2 in {1} & X3 in {0}", 0.1},
                                           {"X1 in {0} & X2 in {1}", 0.2},
                                           {"X1 in {0} & X3 in {0}", 0.104},
                                           {"X3 in {0}", 0.3}};
  PruneParams p;
  p.error = [&](const Condition& c, double) { return stub.at(print_condition(c, s)); };
  const auto traced = prune_rule_traced(r, d, p);
  const std::vector<double> expected{1.0, 0.04, (0.3 - 0.104) / 0.104};
  bool decays = traced.steps.size() == 3;
  std::ostringstream got;
  for (std::size_t i = 0; i < traced.steps.size(); ++i) {
    if (i < expected.size()) decays = decays && std::abs(traced.steps[i].decay - expected[i]) <= 1e-12;
    got << (i ? " " : "") << num(traced.steps[i].decay);
  }
  const auto final_text = print_condition(traced.rule.condition, s);
  line.pass = decays && final_text == "X1 in {0} & X3 in {0}";
  line.detail = "decays [" + got.str() + "], result {" + final_text + "}";
  return line;
}

Line interactions() {
  Line line{"interaction mining ranks the two-player pairs first"};
  const auto d = testing::team();
  ForestParams f;
  f.penalties.assign(d.num_features(), 0.8);
  const auto conditions = extract_conditions(build_forest(d, f), 6);
  const auto rules = assign_outcomes(conditions, d).rules;
  auto mined = mine(itemize(rules, d.schema()), MiningParams{});
  std::erase_if(mined, [](const AssociationRule& r) { return r.lhs.size() != 2; });
  const std::array keys{InteractionKey::support_desc, InteractionKey::confidence_desc};
  mined = rank_interactions(std::move(mined), keys);

  auto pair_condition = [](const AssociationRule& r) { return Condition{{r.lhs[0].term, r.lhs[1].term}}; };
  bool top4 = mined.size() >= 4;
  std::ostringstream top;
  for (std::size_t i = 0; i < std::min<std::size_t>(mined.size(), 10); ++i) {
    const auto& r = mined[i];
    if (i < 4)
      top4 = top4 && is_player_pair(pair_condition(r)) && r.confidence == 1.0 && r.support >= 0.03 &&
             r.support <= 0.06;
    else
      top4 = top4 && r.confidence < 0.75;
    if (i < 6)
      top << (i ? "; " : "") << print_items(r.lhs, d.schema()) << " sup " << num(std::round(r.support * 1000) / 1000)
          << " conf " << num(std::round(r.confidence * 100) / 100);
  }
  double pair_support = 0.0;
  for (const auto& r : mined)
    if (is_player_pair(pair_condition(r))) pair_support = std::max(pair_support, r.support);
  line.pass = top4;
  line.detail = std::to_string(rules.size()) + " transactions; best two-player support " +
                num(std::round(pair_support * 1000) / 1000) + "; top: " + top.str();
  return line;
}

Line bench() {
  Line line{"benchmark rule list error on tictactoe, iris, breast"};
  const std::vector<std::pair<std::string, double>> limits{{"tictactoe", 0.05}, {"iris", 0.10}, {"breast", 0.10}};
  bool ok = true;
  std::ostringstream detail;
  for (const auto& [name, limit] : limits) {
    const auto d = load_csv(std::string(TREERULES_DATA_DIR) + "/" + name + ".csv");
    const auto r = run_bench(d, BenchConfig{});
    const bool pass = r.stel_mean <= limit && r.seconds < 120.0;
    ok = ok && pass;
    detail << (detail.tellp() ? "; " : "") << name << " stel " << num(std::round(r.stel_mean * 1e4) / 1e4)
           << " cart " << num(std::round(r.cart_mean * 1e4) / 1e4) << " (limit " << num(limit) << ", "
           << num(std::round(r.seconds * 10) / 10) << " s)";
  }
  line.pass = ok;
  line.detail = detail.str();
  return line;
}

Line properties() {
  Line line{"property suites"};
  const std::string cmd = std::string(TREERULES_PROPERTIES) + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  if (pipe) {
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int status = pclose(pipe);
    line.pass = WIFEXITED(status) && WEXITSTATUS(status) == 0;
  }
  const auto summary = out.find("test cases:");
  line.detail = summary == std::string::npos ? std::string("no summary")
                                             : std::string(trim(out.substr(summary, out.find('\n', summary) - summary)));
  return line;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance report"};
  bool report_only = false;
  app.add_flag("--report-only", report_only, "exit 0 even when a criterion fails");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (auto check : {team_pipeline, team_stel, pruning_walkthrough, interactions, bench, properties}) {
    const Line line = check();
    failed += !line.pass;
    std::cout << (line.pass ? "PASS " : "FAIL ") << line.name << ": " << line.detail << std::endl;
  }
  std::cout << (6 - failed) << "/6 criteria pass" << std::endl;
  return failed && !report_only ? 1 : 0;
}
