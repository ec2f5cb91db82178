#include <doctest.h>

#include <map>
#include <stdexcept>

#include "support.hpp"
#include "treerules/pruning.hpp"

using namespace treerules;

namespace {

Dataset binary_xyz() {
  CsvOptions o;
  for (const char* name : {"X1", "X2", "X3"}) o.kinds[name] = ColumnKind::categorical;
  return testing::csv(
      "X1,X2,X3,T\n0,1,0,true\n0,1,0,true\n0,0,0,true\n1,1,0,false\n0,1,1,false\n1,0,1,false\n", o);
}

Rule team_rule(const Dataset& d, std::initializer_list<std::pair<std::size_t, const char*>> terms,
               const char* outcome) {
  Rule r;
  for (auto [var, token] : terms) r.condition.terms.push_back(Term::in(var, testing::bit(d, var, token)));
  r.condition = *canonicalize(r.condition, d.schema());
  r.outcome = static_cast<double>(*d.schema().target.find_level(outcome));
  r.metrics = measure(r, d);
  return r;
}

}  // namespace

TEST_CASE("decay values") {
  PruneParams p;
  CHECK(decay_value(0.1, 0.2, p) == doctest::Approx(1.0));
  CHECK(decay_value(0.1, 0.1, p) == 0.0);
  CHECK(decay_value(0.0, 0.01, p) == doctest::Approx(1e4));
  p.mode = DecayMode::absolute;
  CHECK(decay_value(0.1, 0.1, p) == 0.0);
  CHECK(decay_value(0.1, 0.25, p) == doctest::Approx(0.15));
}

TEST_CASE("walkthrough with stubbed errors") {
  const auto d = binary_xyz();
  const auto& s = d.schema();
  Rule r;
  r.condition = parse_condition("X1 in {0} & X2 in {1} & X3 in {0}", s);
  r.outcome = s.parse_outcome("true");

  const std::map<std::string, double> stub{
      {"X1 in {0} & X2 in {1} & X3 in {0}", 0.1},
      {"X1 in {0} & X2 in {1}", 0.2},
      {"X1 in {0} & X3 in {0}", 0.104},
      {"X3 in {0}", 0.3},
  };
  PruneParams p;
  p.error = [&](const Condition& c, double) { return stub.at(print_condition(c, s)); };

  CHECK(decay(r, 2, d, p) == doctest::Approx(1.0).epsilon(1e-12));

  const auto traced = prune_rule_traced(r, d, p);
  REQUIRE(traced.steps.size() == 3);
  CHECK(traced.steps[0].term == 2);
  CHECK(traced.steps[0].decay == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(traced.steps[0].removed);
  CHECK(traced.steps[1].term == 1);
  CHECK(traced.steps[1].decay == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(traced.steps[1].removed);
  CHECK(traced.steps[2].term == 0);
  CHECK(traced.steps[2].error == doctest::Approx(0.104));
  CHECK(traced.steps[2].decay == doctest::Approx((0.3 - 0.104) / 0.104).epsilon(1e-12));
  CHECK_FALSE(traced.steps[2].removed);

  CHECK(print_condition(traced.rule.condition, s) == "X1 in {0} & X3 in {0}");
  CHECK(s.format_outcome(traced.rule.outcome) == "true");
  CHECK(traced.rule.metrics.freq == doctest::Approx(3.0 / 6.0));
  CHECK(traced.rule.metrics.err == 0.0);
}

TEST_CASE("team rule drops the noise player") {
  const auto d = testing::team();
  const auto r = team_rule(d, {{0, "N"}, {1, "N"}, {18, "N"}}, "lose");
  CHECK(r.metrics.freq == doctest::Approx(0.07));
  const auto pruned = prune_rule(r, d, PruneParams{});
  CHECK(print_condition(pruned.condition, d.schema()) == "X1 in {N} & X2 in {N}");
  CHECK(pruned.metrics.freq == doctest::Approx(0.22));
  CHECK(pruned.metrics.err == 0.0);
  CHECK(d.schema().format_outcome(pruned.outcome) == "lose");

  const auto other = prune_rule(team_rule(d, {{0, "Y"}, {1, "N"}, {18, "N"}}, "win"), d, PruneParams{});
  CHECK(print_condition(other.condition, d.schema()) == "X1 in {Y} & X2 in {N}");
  CHECK(other.metrics.freq == doctest::Approx(0.24));
}

TEST_CASE("a single term is never removed") {
  const auto d = testing::team();
  const auto r = team_rule(d, {{5, "Y"}}, "win");
  PruneParams p;
  p.threshold = 1e9;
  const auto traced = prune_rule_traced(r, d, p);
  CHECK(traced.steps.empty());
  CHECK(traced.rule.condition == r.condition);

  const auto longer = prune_rule(team_rule(d, {{3, "Y"}, {5, "Y"}, {7, "N"}}, "win"), d, p);
  CHECK(longer.condition.length() == 1);
  CHECK(longer.condition.terms[0].var == 3);
}

TEST_CASE("threshold zero keeps terms whose removal does not help") {
  const auto d = testing::team();
  PruneParams p;
  p.threshold = 0.0;
  const auto r = team_rule(d, {{0, "N"}, {1, "N"}, {18, "N"}}, "lose");
  CHECK(prune_rule(r, d, p).condition == r.condition);
}

TEST_CASE("decay argument checks") {
  const auto d = testing::team();
  Rule empty;
  CHECK_THROWS_AS(decay(empty, 0, d, PruneParams{}), std::invalid_argument);
  const auto r = team_rule(d, {{0, "N"}}, "lose");
  CHECK_THROWS(decay(r, 1, d, PruneParams{}));
  PruneParams bad;
  bad.s = 0.0;
  CHECK_THROWS_AS(decay(r, 0, d, bad), std::invalid_argument);
  bad.s = 1e-6;
  bad.threshold = -1.0;
  CHECK_THROWS_AS(prune_rule(r, d, bad), std::invalid_argument);
}

TEST_CASE("prune_rules keeps order and length") {
  const auto d = testing::team();
  const std::vector<Rule> rules{team_rule(d, {{0, "N"}, {1, "N"}, {18, "N"}}, "lose"),
                                team_rule(d, {{0, "Y"}, {1, "N"}, {18, "N"}}, "win")};
  const auto pruned = prune_rules(rules, d, PruneParams{});
  REQUIRE(pruned.size() == 2);
  CHECK(d.schema().format_outcome(pruned[0].outcome) == "lose");
  CHECK(d.schema().format_outcome(pruned[1].outcome) == "win");
}
