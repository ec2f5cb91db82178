#include "treerules/trees.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iostream>
#include <numeric>
#include <thread>

#include "treerules/error.hpp"
#include "treerules/random.hpp"
#include "treerules/text.hpp"

namespace treerules {

namespace {

constexpr double kMinGain = 1e-12;
constexpr std::size_t kExhaustiveLevels = 10;

struct Candidate {
  bool valid = false;
  std::size_t feature = 0;
  double point = 0.0;
  double gain = 0.0;   // raw impurity decrease
  double score = 0.0;  // gain after regularization
};

// Higher score wins; near-equal scores fall back to the lower feature index,
// then the smaller split point.
bool better(const Candidate& c, const Candidate& best) {
  if (!best.valid) return true;
  const double tol = 1e-12 * std::max(1.0, std::abs(best.score));
  if (c.score > best.score + tol) return true;
  if (c.score < best.score - tol) return false;
  if (c.feature != best.feature) return c.feature < best.feature;
  return c.point < best.point;
}

// Sufficient statistics of the target over a set of rows.
struct Stats {
  std::vector<double> counts;  // per class (classification)
  double n = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;

  explicit Stats(std::size_t classes = 0) : counts(classes, 0.0) {}

  void add(double y, double w = 1.0) {
    n += w;
    if (!counts.empty()) {
      counts[static_cast<std::size_t>(y)] += w;
    } else {
      sum += w * y;
      sum_sq += w * y * y;
    }
  }
  void add(const Stats& o) {
    n += o.n;
    sum += o.sum;
    sum_sq += o.sum_sq;
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += o.counts[k];
  }
  Stats minus(const Stats& o) const {
    Stats r = *this;
    r.n -= o.n;
    r.sum -= o.sum;
    r.sum_sq -= o.sum_sq;
    for (std::size_t k = 0; k < counts.size(); ++k) r.counts[k] -= o.counts[k];
    return r;
  }

  // n * Gini (classification) or sum of squared deviations (regression).
  double impurity() const {
    if (n <= 0.0) return 0.0;
    if (!counts.empty()) {
      double sq = 0.0;
      for (double c : counts) sq += c * c;
      return std::max(0.0, n - sq / n);
    }
    return std::max(0.0, sum_sq - sum * sum / n);
  }

  double prediction() const {
    if (!counts.empty())
      return static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    return n > 0.0 ? sum / n : 0.0;
  }
};

struct GrowParams {
  std::size_t mtry = 1;
  std::size_t min_leaf = 1;
  std::size_t max_leaves = 0;  // 0 = unlimited
};

// State shared by the trees of a regularized forest.
struct Regularization {
  std::span<const double> penalties;
  std::vector<char> in_used_set;
};

class TreeGrower {
 public:
  TreeGrower(const Dataset& d, const GrowParams& params, Rng& rng, Regularization* reg)
      : d_(d),
        params_(params),
        rng_(rng),
        reg_(reg),
        classes_(d.schema().target.categorical() ? d.schema().target.levels.size() : 0) {}

  NodeTable grow(std::vector<std::size_t> root_rows) {
    NodeTable tree;
    tree.nodes.emplace_back();
    std::deque<std::pair<std::size_t, std::vector<std::size_t>>> queue;
    queue.emplace_back(0, std::move(root_rows));
    std::size_t leaves = 1;
    std::vector<std::size_t> features(d_.num_features());
    while (!queue.empty()) {
      auto [index, rows] = std::move(queue.front());
      queue.pop_front();
      const Stats stats = stats_of(rows);

      Candidate best;
      const bool may_split = rows.size() >= 2 * params_.min_leaf && stats.impurity() > kMinGain &&
                             (params_.max_leaves == 0 || leaves < params_.max_leaves);
      if (may_split) {
        std::iota(features.begin(), features.end(), 0);
        for (std::size_t k = 0; k < params_.mtry; ++k) {
          std::uniform_int_distribution<std::size_t> pick(k, features.size() - 1);
          std::swap(features[k], features[pick(rng_)]);
          Candidate c = d_.schema().predictors[features[k]].categorical()
                            ? best_categorical(features[k], rows, stats)
                            : best_numeric(features[k], rows, stats);
          if (c.valid && better(c, best)) best = c;
        }
      }

      if (!best.valid || best.gain <= kMinGain) {
        Node& leaf = tree.nodes[index];
        leaf.status = -1;
        leaf.pred = stats.prediction();
        continue;
      }

      if (reg_ && !reg_->in_used_set[best.feature]) reg_->in_used_set[best.feature] = 1;
      std::vector<std::size_t> left_rows, right_rows;
      const auto& col = d_.schema().predictors[best.feature];
      for (auto r : rows) {
        const double v = d_.value(r, best.feature);
        const bool left = col.categorical()
                              ? ((static_cast<std::uint64_t>(best.point) >> static_cast<int>(v)) & 1U)
                              : v <= best.point;
        (left ? left_rows : right_rows).push_back(r);
      }
      const auto left_id = static_cast<std::int32_t>(tree.nodes.size() + 1);
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      Node& node = tree.nodes[index];
      node.left = left_id;
      node.right = left_id + 1;
      node.split_var = static_cast<std::int32_t>(best.feature + 1);
      node.split_point = best.point;
      node.status = 1;
      node.pred = 0.0;
      node.gain = best.gain;
      ++leaves;
      queue.emplace_back(static_cast<std::size_t>(left_id - 1), std::move(left_rows));
      queue.emplace_back(static_cast<std::size_t>(left_id), std::move(right_rows));
    }
    return tree;
  }

 private:
  Stats stats_of(std::span<const std::size_t> rows) const {
    Stats s(classes_);
    const auto t = d_.target();
    for (auto r : rows) s.add(t[r]);
    return s;
  }

  double regularize(std::size_t feature, double gain) const {
    if (!reg_ || reg_->in_used_set[feature]) return gain;
    return reg_->penalties[feature] * gain;
  }

  Candidate best_numeric(std::size_t feature, std::span<const std::size_t> rows,
                         const Stats& parent) const {
    const auto col = d_.column(feature);
    const auto t = d_.target();
    std::vector<std::pair<double, double>> items;  // (value, target)
    items.reserve(rows.size());
    for (auto r : rows) items.emplace_back(col[r], t[r]);
    std::sort(items.begin(), items.end());

    Candidate best;
    const double parent_imp = parent.impurity();
    Stats left(classes_);
    const std::size_t m = items.size();
    for (std::size_t i = 1; i < m; ++i) {
      left.add(items[i - 1].second);
      if (items[i - 1].first == items[i].first) continue;
      if (i < params_.min_leaf || m - i < params_.min_leaf) continue;
      const double gain = parent_imp - left.impurity() - parent.minus(left).impurity();
      if (!best.valid || gain > best.gain + 1e-12 * std::max(1.0, best.gain)) {
        double mid = 0.5 * (items[i - 1].first + items[i].first);
        if (!(mid < items[i].first)) mid = items[i - 1].first;
        best = {true, feature, mid, gain, 0.0};
      }
    }
    best.score = regularize(feature, best.gain);
    return best;
  }

  Candidate best_categorical(std::size_t feature, std::span<const std::size_t> rows,
                             const Stats& parent) const {
    const auto col = d_.column(feature);
    const auto t = d_.target();
    const std::size_t n_levels = d_.schema().predictors[feature].levels.size();
    std::vector<Stats> per_level(n_levels, Stats(classes_));
    for (auto r : rows) per_level[static_cast<std::size_t>(col[r])].add(t[r]);
    std::vector<std::size_t> present;
    std::uint64_t present_mask = 0;
    for (std::size_t l = 0; l < n_levels; ++l)
      if (per_level[l].n > 0) {
        present.push_back(l);
        present_mask |= std::uint64_t{1} << l;
      }

    Candidate best;
    if (present.size() < 2) return best;
    const double parent_imp = parent.impurity();
    auto consider = [&](std::uint64_t mask, const Stats& left) {
      const Stats right = parent.minus(left);
      if (left.n < static_cast<double>(params_.min_leaf) ||
          right.n < static_cast<double>(params_.min_leaf))
        return;
      const double gain = parent_imp - left.impurity() - right.impurity();
      const std::uint64_t point = std::min(mask, present_mask ^ mask);
      const double p = static_cast<double>(point);
      const double tol = 1e-12 * std::max(1.0, best.gain);
      if (!best.valid || gain > best.gain + tol || (gain >= best.gain - tol && p < best.point))
        best = {true, feature, p, gain, 0.0};
    };

    const bool ordered = classes_ == 0 || classes_ == 2 || present.size() > kExhaustiveLevels;
    if (ordered) {
      // Sorting levels by mean target (or by share of one class) makes the
      // best binary partition a prefix of the order for regression and for
      // two classes; beyond that it is a heuristic.
      std::size_t key_class = 1;
      if (classes_ > 2) key_class = static_cast<std::size_t>(parent.prediction());
      auto key = [&](std::size_t l) {
        const Stats& s = per_level[l];
        return classes_ == 0 ? s.sum / s.n : s.counts[key_class] / s.n;
      };
      std::stable_sort(present.begin(), present.end(),
                       [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
      Stats left(classes_);
      std::uint64_t mask = 0;
      for (std::size_t k = 0; k + 1 < present.size(); ++k) {
        left.add(per_level[present[k]]);
        mask |= std::uint64_t{1} << present[k];
        consider(mask, left);
      }
    } else {
      // Each partition once: subsets that leave out the last present level.
      const std::size_t m = present.size() - 1;
      for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << m); ++bits) {
        Stats left(classes_);
        std::uint64_t mask = 0;
        for (std::size_t k = 0; k < m; ++k)
          if ((bits >> k) & 1U) {
            left.add(per_level[present[k]]);
            mask |= std::uint64_t{1} << present[k];
          }
        consider(mask, left);
      }
    }
    best.score = regularize(feature, best.gain);
    return best;
  }

  const Dataset& d_;
  GrowParams params_;
  Rng& rng_;
  Regularization* reg_;
  std::size_t classes_;
};

GrowParams resolve(const Dataset& d, const ForestParams& params) {
  const std::size_t p = d.num_features();
  GrowParams g;
  g.mtry = params.mtry.value_or(default_mtry(d.task(), p));
  g.min_leaf = params.min_leaf.value_or(default_min_leaf(d.task()));
  g.max_leaves = params.max_leaves.value_or(0);
  if (g.mtry < 1 || g.mtry > p) throw std::invalid_argument("mtry must lie in [1, p]");
  if (g.min_leaf < 1) throw std::invalid_argument("min_leaf must be at least 1");
  if (params.max_leaves && *params.max_leaves < 1)
    throw std::invalid_argument("max_leaves must be at least 1");
  return g;
}

std::vector<std::size_t> draw_rows(std::size_t n, bool bootstrap, Rng& rng) {
  std::vector<std::size_t> rows(n);
  if (bootstrap) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (auto& r : rows) r = pick(rng);
  } else {
    std::iota(rows.begin(), rows.end(), 0);
  }
  return rows;
}

std::int32_t parse_int(std::string_view text, const std::string& where) {
  auto v = parse_number(text);
  if (!v || *v != std::floor(*v) || std::abs(*v) > 2e9)
    throw DataError(where + ": expected an integer, got '" + std::string(text) + "'");
  return static_cast<std::int32_t>(*v);
}

}  // namespace

std::size_t default_mtry(Task task, std::size_t p) {
  if (task == Task::classification)
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p)))));
  return std::max<std::size_t>(1, p / 3);
}

std::size_t default_min_leaf(Task task) { return task == Task::classification ? 1 : 5; }

Ensemble build_forest(const Dataset& d, const ForestParams& params) {
  if (d.num_rows() == 0) throw std::invalid_argument("cannot train on an empty dataset");
  if (params.n_trees == 0) throw std::invalid_argument("need at least one tree");
  const GrowParams grow = resolve(d, params);
  const std::size_t p = d.num_features();
  const std::size_t n = d.num_rows();

  std::optional<Regularization> reg;
  if (!params.penalties.empty()) {
    if (params.penalties.size() != p)
      throw std::invalid_argument("need one penalty coefficient per feature");
    for (double l : params.penalties)
      if (!(l > 0.0 && l <= 1.0)) throw std::invalid_argument("penalty coefficients must lie in (0,1]");
    reg = Regularization{params.penalties, std::vector<char>(p, 0)};
  }

  Ensemble e;
  e.schema = d.schema();
  e.trees.resize(params.n_trees);
  std::vector<std::vector<std::size_t>> samples(params.n_trees);

  auto build_one = [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, t));
    samples[t] = draw_rows(n, params.bootstrap, rng);
    TreeGrower grower(d, grow, rng, reg ? &*reg : nullptr);
    e.trees[t] = grower.grow(samples[t]);
  };

  std::size_t threads = params.threads ? params.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, params.n_trees);
  if (reg || threads == 1) {
    // The used-feature set is updated in tree order, so regularized trees
    // are grown one after another.
    for (std::size_t t = 0; t < params.n_trees; ++t) build_one(t);
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w)
      workers.emplace_back([&, w] {
        for (std::size_t t = w; t < params.n_trees; t += threads) build_one(t);
      });
  }

  if (params.bootstrap) {
    const bool classify = d.task() == Task::classification;
    const std::size_t classes = classify ? d.schema().target.levels.size() : 0;
    std::vector<char> in_bag(n);
    std::vector<std::vector<double>> votes(n, std::vector<double>(classify ? classes : 2, 0.0));
    for (std::size_t t = 0; t < params.n_trees; ++t) {
      std::fill(in_bag.begin(), in_bag.end(), 0);
      for (auto r : samples[t]) in_bag[r] = 1;
      for (std::size_t r = 0; r < n; ++r) {
        if (in_bag[r]) continue;
        const double pred = route(e.trees[t], d.schema(), d.instance(r)).pred;
        if (classify) {
          votes[r][static_cast<std::size_t>(pred)] += 1.0;
        } else {
          votes[r][0] += pred;
          votes[r][1] += 1.0;
        }
      }
    }
    double loss = 0.0;
    std::size_t counted = 0;
    const auto target = d.target();
    for (std::size_t r = 0; r < n; ++r) {
      const auto& v = votes[r];
      if (classify) {
        const auto total = std::accumulate(v.begin(), v.end(), 0.0);
        if (total == 0.0) continue;
        const auto guess = static_cast<double>(std::max_element(v.begin(), v.end()) - v.begin());
        loss += guess != target[r] ? 1.0 : 0.0;
      } else {
        if (v[1] == 0.0) continue;
        const double diff = v[0] / v[1] - target[r];
        loss += diff * diff;
      }
      ++counted;
    }
    if (counted) e.oob_error = loss / static_cast<double>(counted);
  }
  return e;
}

NodeTable build_cart(const Dataset& d, std::size_t min_leaf, std::uint64_t seed) {
  if (d.num_rows() == 0) throw std::invalid_argument("cannot train on an empty dataset");
  GrowParams grow{d.num_features(), std::max<std::size_t>(1, min_leaf), 0};
  Rng rng(seed);
  TreeGrower grower(d, grow, rng, nullptr);
  std::vector<std::size_t> rows(d.num_rows());
  std::iota(rows.begin(), rows.end(), 0);
  return grower.grow(std::move(rows));
}

RouteResult route(const NodeTable& tree, const Schema& schema, std::span<const double> x) {
  std::int32_t id = 1;
  while (true) {
    const Node& node = tree.node(id);
    if (node.leaf()) return {id, node.pred};
    const auto var = static_cast<std::size_t>(node.split_var - 1);
    const double v = x[var];
    bool left;
    if (schema.predictors[var].categorical()) {
      if (!(v >= 0.0 && v < static_cast<double>(schema.predictors[var].levels.size())))
        throw DataError("unknown level in column '" + schema.predictors[var].name + "'");
      left = (static_cast<std::uint64_t>(node.split_point) >> static_cast<int>(v)) & 1U;
    } else {
      left = v <= node.split_point;
    }
    id = left ? node.left : node.right;
  }
}

double predict(const Ensemble& e, std::span<const double> x) {
  if (e.task() == Task::classification) {
    std::vector<std::size_t> votes(e.schema.target.levels.size(), 0);
    for (const auto& t : e.trees) ++votes[static_cast<std::size_t>(route(t, e.schema, x).pred)];
    return static_cast<double>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  double sum = 0.0;
  for (const auto& t : e.trees) sum += route(t, e.schema, x).pred;
  return sum / static_cast<double>(e.trees.size());
}

std::vector<double> importance(const Ensemble& e) {
  std::vector<double> score(e.schema.num_features(), 0.0);
  for (const auto& t : e.trees)
    for (const auto& node : t.nodes)
      if (!node.leaf()) score[static_cast<std::size_t>(node.split_var - 1)] += node.gain;
  const double top = score.empty() ? 0.0 : *std::max_element(score.begin(), score.end());
  if (top <= 0.0) return std::vector<double>(score.size(), 0.0);
  for (auto& s : score) s = std::max(0.0, s / top);
  return score;
}

std::vector<std::size_t> used_features(const Ensemble& e) {
  std::vector<std::size_t> order;
  std::vector<char> seen(e.schema.num_features(), 0);
  for (const auto& t : e.trees)
    for (const auto& node : t.nodes)
      if (!node.leaf()) {
        const auto f = static_cast<std::size_t>(node.split_var - 1);
        if (!seen[f]) {
          seen[f] = 1;
          order.push_back(f);
        }
      }
  return order;
}

void validate(const NodeTable& tree, const Schema& schema, std::size_t tree_id) {
  const auto m = static_cast<std::int32_t>(tree.nodes.size());
  auto fail = [&](std::int32_t id, const std::string& what) {
    throw DataError("tree " + std::to_string(tree_id) + " node " + std::to_string(id) + ": " + what);
  };
  if (m == 0) fail(0, "empty tree");
  std::vector<int> parents(tree.nodes.size(), 0);
  for (std::int32_t id = 1; id <= m; ++id) {
    const Node& node = tree.node(id);
    if (node.status == -1) {
      if (node.left != 0 || node.right != 0) fail(id, "leaf with children");
      if (node.split_var != 0 || node.split_point != 0.0) fail(id, "leaf with a split");
      if (schema.task() == Task::classification) {
        const double k = node.pred;
        if (!(k >= 0 && k < static_cast<double>(schema.target.levels.size()) && k == std::floor(k)))
          fail(id, "leaf prediction is not a class");
      } else if (!std::isfinite(node.pred)) {
        fail(id, "non-finite leaf prediction");
      }
      continue;
    }
    if (node.status != 1) fail(id, "status must be -1 or 1");
    if (node.left == 0 || node.right == 0) fail(id, "internal node without two children");
    if (node.left == node.right) fail(id, "both children are the same node");
    for (auto child : {node.left, node.right}) {
      if (child <= id || child > m) fail(id, "child id " + std::to_string(child) + " out of range");
      ++parents[static_cast<std::size_t>(child - 1)];
    }
    if (node.split_var < 1 || static_cast<std::size_t>(node.split_var) > schema.num_features())
      fail(id, "split variable out of range");
    const auto& col = schema.predictors[static_cast<std::size_t>(node.split_var - 1)];
    if (col.categorical()) {
      const double mask = node.split_point;
      const double all = std::ldexp(1.0, static_cast<int>(col.levels.size())) - 1.0;
      if (mask != std::floor(mask) || mask < 1.0 || mask >= all)
        fail(id, "categorical split mask must be a non-empty proper level subset");
    } else if (!std::isfinite(node.split_point)) {
      fail(id, "non-finite split point");
    }
  }
  for (std::int32_t id = 2; id <= m; ++id)
    if (parents[static_cast<std::size_t>(id - 1)] != 1)
      fail(id, "has " + std::to_string(parents[static_cast<std::size_t>(id - 1)]) + " parents");
}

void write_node_tables(const Ensemble& e, std::ostream& out) {
  out << "tree_id,node,left,right,split_var,split_point,status,pred\n";
  for (std::size_t t = 0; t < e.trees.size(); ++t) {
    const auto& nodes = e.trees[t].nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Node& n = nodes[i];
      out << (t + 1) << ',' << (i + 1) << ',' << n.left << ',' << n.right << ',' << n.split_var
          << ',' << format_number(n.split_point) << ',' << n.status << ','
          << (n.leaf() ? e.schema.format_outcome(n.pred) : "0") << '\n';
    }
  }
}

Ensemble read_node_tables(std::istream& in, const Schema& schema) {
  static constexpr std::string_view kHeader = "tree_id,node,left,right,split_var,split_point,status,pred";
  Ensemble e;
  e.schema = schema;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (!header) {
      if (text != kHeader) throw DataError("node table: unexpected header '" + std::string(text) + "'");
      header = true;
      continue;
    }
    const auto fields = split(text, ',');
    const std::string where = "node table line " + std::to_string(line_no);
    if (fields.size() != 8) throw DataError(where + ": expected 8 fields");
    const auto tree_id = parse_int(trim(fields[0]), where);
    const auto node_id = parse_int(trim(fields[1]), where);
    if (tree_id == static_cast<std::int32_t>(e.trees.size()) + 1) {
      e.trees.emplace_back();
    } else if (tree_id != static_cast<std::int32_t>(e.trees.size())) {
      throw DataError(where + ": tree ids must run 1,2,... in order");
    }
    auto& tree = e.trees.back();
    if (node_id != static_cast<std::int32_t>(tree.nodes.size()) + 1)
      throw DataError("tree " + std::to_string(tree_id) + " node " + std::to_string(node_id) +
                      ": node ids must run 1,2,... in order");
    Node n;
    n.left = parse_int(trim(fields[2]), where);
    n.right = parse_int(trim(fields[3]), where);
    n.split_var = parse_int(trim(fields[4]), where);
    auto point = parse_number(trim(fields[5]));
    if (!point) throw DataError(where + ": bad split point");
    n.split_point = *point;
    n.status = parse_int(trim(fields[6]), where);
    const auto pred = trim(fields[7]);
    if (n.status == -1) {
      try {
        n.pred = schema.parse_outcome(pred);
      } catch (const DataError& err) {
        throw DataError("tree " + std::to_string(tree_id) + " node " + std::to_string(node_id) +
                        ": " + err.what());
      }
    }
    tree.nodes.push_back(n);
  }
  if (!header) throw DataError("node table: empty file");
  if (e.trees.empty()) throw DataError("node table: no trees");
  for (std::size_t t = 0; t < e.trees.size(); ++t) validate(e.trees[t], schema, t + 1);
  return e;
}

void export_node_tables(const Ensemble& e, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_node_tables(e, out);
}

Ensemble import_node_tables(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_node_tables(in, schema);
}

}  // namespace treerules
