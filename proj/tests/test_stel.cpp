#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "treerules/pipeline.hpp"
#include "treerules/stel.hpp"

using namespace treerules;

namespace {

Rule rule(const Dataset& d, const std::string& condition, const std::string& outcome) {
  Rule r;
  r.condition = parse_condition(condition, d.schema());
  r.outcome = d.schema().parse_outcome(outcome);
  r.metrics = measure(r, d);
  return r;
}

RuleList team_list(std::uint64_t seed) {
  const auto d = testing::team();
  PipelineConfig config;
  config.seed = seed;
  config.max_conditions = 0;
  config.forest.penalties.assign(d.num_features(), 0.8);
  return run_pipeline(d, config, false).stel;
}

}  // namespace

TEST_CASE("team data gives the three-rule list") {
  const auto d = testing::team();
  const auto& s = d.schema();
  const auto list = team_list(1);
  REQUIRE(list.rules.size() == 3);
  CHECK(print_condition(list.rules[0].condition, s) == "X1 in {N} & X2 in {Y}");
  CHECK(s.format_outcome(list.rules[0].outcome) == "win");
  CHECK(list.rules[0].metrics.freq == doctest::Approx(0.32));
  CHECK(list.rules[0].metrics.err == 0.0);
  CHECK(print_condition(list.rules[1].condition, s) == "X1 in {Y} & X2 in {N}");
  CHECK(list.rules[1].metrics.freq == doctest::Approx(0.24));
  CHECK(list.rules[1].metrics.err == 0.0);
  CHECK(list.default_rule().condition.empty());
  CHECK(s.format_outcome(list.default_rule().outcome) == "lose");
  CHECK(list.default_rule().metrics.freq == doctest::Approx(0.44));
  CHECK(evaluate(list, d) == 0.0);
}

TEST_CASE("predict uses the first matching rule") {
  const auto d = testing::team();
  const auto list = team_list(1);
  Instance x(d.num_features(), testing::level(d, 0, "N"));
  x[1] = testing::level(d, 1, "Y");
  CHECK(d.schema().format_outcome(predict(list, x)) == "win");
  x[1] = testing::level(d, 1, "N");
  CHECK(d.schema().format_outcome(predict(list, x)) == "lose");
  x[0] = kUnknownLevel;
  CHECK(d.schema().format_outcome(predict(list, x)) == "lose");

  RuleList overlapping;
  overlapping.rules = {rule(d, "X1 in {N}", "win"), rule(d, "X2 in {N}", "lose"), Rule{}};
  x[0] = testing::level(d, 0, "N");
  CHECK(d.schema().format_outcome(predict(overlapping, x)) == "win");
}

TEST_CASE("a single clean rule comes first, then the default") {
  const auto d = testing::csv("x,t\n1,a\n2,a\n3,b\n4,b\n5,b\n");
  const std::vector<Rule> rules{rule(d, "X1 <= 2", "a")};
  const auto list = build_stel(rules, d);
  REQUIRE(list.rules.size() == 2);
  CHECK(list.rules[0].condition == rules[0].condition);
  CHECK(list.rules[0].metrics.freq == doctest::Approx(0.4));
  CHECK(d.schema().format_outcome(list.default_rule().outcome) == "b");
  CHECK(list.default_rule().metrics.err == 0.0);
  CHECK(evaluate(list, d) == 0.0);
}

TEST_CASE("the default rule wins ties") {
  const auto d = testing::csv("x,t\n1,k\n2,k\n3,k\n");
  const std::vector<Rule> rules{rule(d, "X1 <= 5", "k")};
  const auto list = build_stel(rules, d);
  REQUIRE(list.rules.size() == 1);
  CHECK(list.default_rule().condition.empty());
  CHECK(list.default_rule().metrics.freq == 1.0);
  CHECK(evaluate(list, d) == 0.0);
}

TEST_CASE("identical metrics keep input order") {
  const auto d = testing::csv("x,y,t\n1,1,a\n1,1,a\n2,2,b\n3,3,b\n4,4,b\n");
  const std::vector<Rule> rules{rule(d, "X2 <= 1", "a"), rule(d, "X1 <= 1", "a")};
  const auto list = build_stel(rules, d);
  REQUIRE(list.rules.size() == 2);
  CHECK(list.rules[0].condition == rules[0].condition);
  const std::vector<Rule> swapped{rules[1], rules[0]};
  CHECK(build_stel(swapped, d).rules[0].condition == rules[1].condition);
}

TEST_CASE("rules below the frequency threshold are ignored") {
  const auto d = testing::csv("x,t\n1,a\n2,b\n3,b\n4,b\n5,b\n");
  const std::vector<Rule> rules{rule(d, "X1 <= 1", "a")};
  CHECK(build_stel(rules, d, 0.5).rules.size() == 1);
  CHECK(build_stel(rules, d, 0.2).rules.size() == 2);
  CHECK(build_stel(std::vector<Rule>{}, d).rules.size() == 1);
}

TEST_CASE("metrics are taken on the remaining rows") {
  // After X1 <= 2 removes rows 1-2, X1 <= 4 covers rows 3-4 only.
  const auto d = testing::csv("x,t\n1,a\n2,a\n3,c\n4,c\n5,b\n6,b\n7,b\n");
  const std::vector<Rule> rules{rule(d, "X1 <= 4", "c"), rule(d, "X1 <= 2", "a")};
  const auto list = build_stel(rules, d);
  REQUIRE(list.rules.size() == 3);
  CHECK(d.schema().format_outcome(list.rules[0].outcome) == "a");
  CHECK(d.schema().format_outcome(list.rules[1].outcome) == "c");
  CHECK(list.rules[1].metrics.freq == doctest::Approx(2.0 / 7.0));
  CHECK(list.rules[1].metrics.err == 0.0);
  CHECK(list.default_rule().metrics.freq == doctest::Approx(3.0 / 7.0));
}

TEST_CASE("the default rule always keeps some rows") {
  // A rule covering every remaining row can at best tie the default.
  const auto d = testing::csv("x,t\n1,a\n2,b\n3,b\n");
  const std::vector<Rule> rules{rule(d, "X1 <= 1", "a"), rule(d, "X1 > 1", "b")};
  const auto list = build_stel(rules, d, 0.0);
  REQUIRE(list.rules.size() == 2);
  CHECK(d.schema().format_outcome(list.rules[0].outcome) == "b");
  CHECK(d.schema().format_outcome(list.default_rule().outcome) == "a");
  CHECK(list.default_rule().metrics.covered == 1);
  CHECK(evaluate(list, d) == 0.0);
}

TEST_CASE("evaluate counts first-match mistakes by hand") {
  const auto d = testing::csv("x,y,t\n1,0,a\n2,1,a\n3,0,b\n4,1,b\n");
  RuleList list;
  list.rules = {rule(d, "X2 > 0.5", "b"), rule(d, "X1 <= 3", "a"), Rule{}};
  list.rules.back().outcome = d.schema().parse_outcome("b");
  // Row 1 a (rule 2, ok), row 2 b (rule 1, wrong), row 3 a (rule 2, wrong), row 4 b (rule 1, ok).
  CHECK(evaluate(list, d) == 0.5);
}

TEST_CASE("regression lists use squared error") {
  const auto d = testing::csv("x,t\n1,1\n2,3\n3,10\n4,10\n");
  const std::vector<Rule> rules{rule(d, "X1 > 2.5", "10")};
  const auto list = build_stel(rules, d);
  REQUIRE(list.rules.size() == 2);
  CHECK(list.default_rule().outcome == 2.0);
  CHECK(evaluate(list, d) == doctest::Approx(0.5));
}

TEST_CASE("rule list file round trip") {
  const auto d = testing::team();
  const auto list = team_list(2);
  std::stringstream io;
  write_rule_list(list, d.schema(), io);
  const auto text = io.str();
  CHECK(text.rfind("position,len,freq,err,condition,pred\n", 0) == 0);
  CHECK(text.find(",TRUE,lose\n") != std::string::npos);
  const auto back = read_rule_list(io, d.schema());
  REQUIRE(back.rules.size() == list.rules.size());
  for (std::size_t i = 0; i < list.rules.size(); ++i) {
    CHECK(back.rules[i].condition == list.rules[i].condition);
    CHECK(back.rules[i].outcome == list.rules[i].outcome);
  }
  std::ostringstream again;
  write_rule_list(back, d.schema(), again);
  CHECK(again.str() == text);
}

TEST_CASE("building is deterministic") {
  const auto d = testing::random_mixed(150, 8);
  PipelineConfig config;
  config.forest.n_trees = 10;
  const auto a = run_pipeline(d, config, false).stel;
  const auto b = run_pipeline(d, config, false).stel;
  REQUIRE(a.rules.size() == b.rules.size());
  for (std::size_t i = 0; i < a.rules.size(); ++i) {
    CHECK(a.rules[i].condition == b.rules[i].condition);
    CHECK(a.rules[i].outcome == b.rules[i].outcome);
  }
}
