#include "treerules/selection.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace treerules {

namespace {

constexpr double kMinLambda = 1e-6;

void check(const SelectionParams& p) {
  if (!(p.lambda0 > 0.0 && p.lambda0 <= 1.0)) throw std::invalid_argument("lambda0 must lie in (0,1]");
  if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0,1]");
  if (!(p.beta >= 0.0 && p.beta <= 1.0)) throw std::invalid_argument("beta must lie in [0,1]");
}

ForestParams plain(ForestParams f, std::size_t p, Task task) {
  f.penalties.clear();
  if (f.mtry && *f.mtry > p) f.mtry.reset();
  if (!f.mtry) f.mtry = default_mtry(task, p);
  return f;
}

}  // namespace

bool IndicatorDataset::constant(std::size_t column) const {
  const auto& c = columns.at(column);
  return std::adjacent_find(c.begin(), c.end(), std::not_equal_to<>()) == c.end();
}

Dataset IndicatorDataset::to_dataset(std::span<const std::size_t> which) const {
  std::vector<std::size_t> all;
  if (which.empty()) {
    all.resize(columns.size());
    std::iota(all.begin(), all.end(), 0);
    which = all;
  }
  Schema schema;
  std::vector<std::vector<double>> cols;
  for (auto j : which) {
    schema.predictors.push_back({"C" + std::to_string(j + 1), ColumnKind::numeric, {}});
    cols.emplace_back(columns.at(j).begin(), columns.at(j).end());
  }
  schema.target = target_schema;
  return Dataset(std::move(schema), std::move(cols), target);
}

IndicatorDataset indicator_matrix(std::span<const Condition> conditions, const Dataset& d) {
  IndicatorDataset out;
  out.target_schema = d.schema().target;
  out.target.assign(d.target().begin(), d.target().end());
  out.columns.reserve(conditions.size());
  for (const auto& c : conditions) out.columns.push_back(coverage(c, d));
  return out;
}

std::vector<double> complexity_lambdas(std::span<const Condition> conditions,
                                       const SelectionParams& params,
                                       std::span<const double> importances) {
  check(params);
  if (params.beta > 0.0 && importances.size() != conditions.size())
    throw std::invalid_argument("importance scores are required when beta > 0");
  std::size_t longest = 0;
  for (const auto& c : conditions) longest = std::max(longest, c.length());
  if (longest == 0) throw std::invalid_argument("need at least one condition with terms");
  std::vector<double> lambdas;
  lambdas.reserve(conditions.size());
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    double factor = 1.0 - params.gamma * static_cast<double>(conditions[i].length()) /
                              static_cast<double>(longest);
    if (params.beta > 0.0) factor += params.beta * importances[i];
    lambdas.push_back(std::clamp(params.lambda0 * factor, kMinLambda, 1.0));
  }
  return lambdas;
}

Selection select_conditions(std::span<const Condition> conditions, const Dataset& d,
                            const SelectionParams& params) {
  check(params);
  if (conditions.empty()) throw std::invalid_argument("nothing to select from");
  Selection out;
  out.seed = params.forest.seed;

  const auto indicators = indicator_matrix(conditions, d);
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < indicators.num_columns(); ++j)
    if (!indicators.constant(j)) kept.push_back(j);
  if (kept.empty()) return out;

  const Dataset data = indicators.to_dataset(kept);
  std::vector<Condition> candidates;
  for (auto j : kept) candidates.push_back(conditions[j]);

  std::vector<double> global;
  if (params.beta > 0.0)
    global = importance(build_forest(data, plain(params.forest, kept.size(), d.task())));

  ForestParams guided = params.forest;
  guided.penalties = complexity_lambdas(candidates, params, global);
  if (!guided.mtry || *guided.mtry > kept.size()) guided.mtry = kept.size();
  const Ensemble forest = build_forest(data, guided);
  const auto chosen = used_features(forest);  // positions within `kept`
  if (chosen.empty()) return out;

  std::vector<double> scores(chosen.size(), 0.0);
  if (params.rescore) {
    const Dataset restricted = indicators.to_dataset([&] {
      std::vector<std::size_t> cols;
      for (auto k : chosen) cols.push_back(kept[k]);
      return cols;
    }());
    scores = importance(build_forest(restricted, plain(params.forest, chosen.size(), d.task())));
  } else {
    const auto imp = importance(forest);
    for (std::size_t i = 0; i < chosen.size(); ++i) scores[i] = imp[chosen[i]];
  }

  std::vector<std::size_t> order(chosen.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  for (auto i : order) {
    out.indices.push_back(kept[chosen[i]]);
    out.conditions.push_back(conditions[kept[chosen[i]]]);
    out.scores.push_back(scores[i]);
  }
  return out;
}

}  // namespace treerules
