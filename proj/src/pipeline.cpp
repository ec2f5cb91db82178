#include "treerules/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

#include "treerules/random.hpp"

namespace treerules {

std::vector<Condition> sample_conditions(std::vector<Condition> conditions, std::size_t cap,
                                         std::uint64_t seed) {
  if (cap == 0 || conditions.size() <= cap) return conditions;
  std::vector<std::size_t> index(conditions.size());
  std::iota(index.begin(), index.end(), 0);
  Rng rng(seed);
  for (std::size_t k = 0; k < cap; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, index.size() - 1);
    std::swap(index[k], index[pick(rng)]);
  }
  index.resize(cap);
  std::sort(index.begin(), index.end());
  std::vector<Condition> out;
  out.reserve(cap);
  for (auto i : index) out.push_back(std::move(conditions[i]));
  return out;
}

std::vector<Rule> dedup_rules(std::vector<Rule> rules) {
  std::set<Condition> seen;
  std::vector<Rule> out;
  for (auto& r : rules)
    if (seen.insert(r.condition).second) out.push_back(std::move(r));
  return out;
}

PipelineResult run_pipeline(const Dataset& train, const PipelineConfig& config, bool with_selection) {
  PipelineResult out;
  ForestParams forest = config.forest;
  forest.seed = config.seed;
  out.forest = build_forest(train, forest);

  out.extracted = sample_conditions(extract_conditions(out.forest, config.max_depth),
                                    config.max_conditions, derive_seed(config.seed, 1));
  out.unique = dedup(out.extracted);
  out.rules = assign_outcomes(out.unique, train).rules;
  out.pruned = dedup_rules(prune_rules(out.rules, train, config.prune));

  if (with_selection && !out.pruned.empty()) {
    std::vector<Condition> pruned_conditions;
    for (const auto& r : out.pruned) pruned_conditions.push_back(r.condition);
    SelectionParams sp = config.selection;
    sp.forest.seed = derive_seed(config.seed, 2);
    sp.forest.threads = forest.threads;
    out.selection = select_conditions(pruned_conditions, train, sp);
    for (auto i : out.selection.indices) out.selected.push_back(out.pruned[i]);
  }
  out.stel = build_stel(out.pruned, train, config.stel_threshold);
  return out;
}

double relative_difference(double a, double b) {
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi > 0.0 ? (hi - lo) / hi : 0.0;
}

double paired_t(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n < 2 || b.size() != n) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : diff) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) return mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean);
  return mean / (sd / std::sqrt(static_cast<double>(n)));
}

BenchResult run_bench(const Dataset& d, const BenchConfig& config) {
  if (config.runs == 0) throw std::invalid_argument("need at least one run");
  const auto start = std::chrono::steady_clock::now();
  BenchResult result;
  result.runs.resize(config.runs);

  auto one = [&](std::size_t r) {
    BenchRun& run = result.runs[r];
    run.seed = derive_seed(config.pipeline.seed, r);
    auto [train, test] = split(d, config.train_fraction, run.seed);
    PipelineConfig pc = config.pipeline;
    pc.seed = run.seed;
    pc.forest.threads = 1;
    const auto p = run_pipeline(train, pc, false);
    run.stel_error = evaluate(p.stel, test);
    run.stel_rules = p.stel.rules.size();

    const NodeTable cart = build_cart(train, config.cart_min_leaf, run.seed);
    double wrong = 0.0;
    for (std::size_t i = 0; i < test.num_rows(); ++i) {
      const double guess = route(cart, test.schema(), test.instance(i)).pred;
      const double truth = test.target()[i];
      wrong += test.task() == Task::classification ? (guess != truth ? 1.0 : 0.0)
                                                   : (guess - truth) * (guess - truth);
    }
    run.cart_error = wrong / static_cast<double>(test.num_rows());
  };

  std::size_t threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, config.runs);
  if (threads == 1) {
    for (std::size_t r = 0; r < config.runs; ++r) one(r);
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w)
      workers.emplace_back([&, w] {
        for (std::size_t r = w; r < config.runs; r += threads) one(r);
      });
  }

  std::vector<double> stel, cart;
  for (const auto& run : result.runs) {
    stel.push_back(run.stel_error);
    cart.push_back(run.cart_error);
  }
  const double n = static_cast<double>(config.runs);
  result.stel_mean = std::accumulate(stel.begin(), stel.end(), 0.0) / n;
  result.cart_mean = std::accumulate(cart.begin(), cart.end(), 0.0) / n;
  result.relative_difference = relative_difference(result.stel_mean, result.cart_mean);
  result.t_statistic = paired_t(stel, cart);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace treerules
