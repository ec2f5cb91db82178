#include "treerules/interactions.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <stdexcept>

#include "treerules/text.hpp"

namespace treerules {

std::strong_ordering operator<=>(const Item& a, const Item& b) {
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  switch (a.kind) {
    case Item::Kind::term:
      return a.term <=> b.term;
    case Item::Kind::variable:
      return a.term.var <=> b.term.var;
    case Item::Kind::target:
      if (a.outcome < b.outcome) return std::strong_ordering::less;
      if (b.outcome < a.outcome) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
  }
  return std::strong_ordering::equal;
}

std::vector<Transaction> itemize(std::span<const Rule> rules, const Schema& schema,
                                 bool numeric_as_variable) {
  std::vector<Transaction> out;
  out.reserve(rules.size());
  for (const auto& r : rules) {
    std::set<Item> items;
    for (const auto& t : r.condition.terms) {
      if (numeric_as_variable && !schema.predictors.at(t.var).categorical())
        items.insert(Item::of_variable(t.var));
      else
        items.insert(Item::of_term(t));
    }
    items.insert(Item::of_target(r.outcome));
    out.push_back({std::vector<Item>(items.begin(), items.end())});
  }
  return out;
}

std::vector<AssociationRule> mine(std::span<const Transaction> transactions, const MiningParams& params) {
  if (!(params.min_support > 0.0 && params.min_support <= 1.0))
    throw std::invalid_argument("min_support must lie in (0,1]");
  if (!(params.min_confidence > 0.0 && params.min_confidence <= 1.0))
    throw std::invalid_argument("min_confidence must lie in (0,1]");
  if (params.max_length < 2) throw std::invalid_argument("max_length must be at least 2");
  if (transactions.empty()) return {};

  // Dense ids in item order, so sorted id vectors are sorted item vectors.
  std::map<Item, int> item_ids, target_ids;
  for (const auto& tr : transactions) {
    std::size_t targets = 0;
    for (const auto& item : tr.items) {
      if (item.kind == Item::Kind::target) {
        target_ids.emplace(item, 0);
        ++targets;
      } else {
        item_ids.emplace(item, 0);
      }
    }
    if (targets != 1) throw std::invalid_argument("every transaction needs exactly one target item");
  }
  std::vector<Item> items, targets;
  for (auto& [item, id] : item_ids) {
    id = static_cast<int>(items.size());
    items.push_back(item);
  }
  for (auto& [item, id] : target_ids) {
    id = static_cast<int>(targets.size());
    targets.push_back(item);
  }

  struct Encoded {
    std::vector<int> items;
    int target;
  };
  std::vector<Encoded> encoded;
  encoded.reserve(transactions.size());
  for (const auto& tr : transactions) {
    Encoded e{{}, 0};
    for (const auto& item : tr.items) {
      if (item.kind == Item::Kind::target)
        e.target = target_ids.at(item);
      else
        e.items.push_back(item_ids.at(item));
    }
    std::sort(e.items.begin(), e.items.end());
    encoded.push_back(std::move(e));
  }

  const double total = static_cast<double>(transactions.size());
  const auto needed = static_cast<std::size_t>(std::ceil(params.min_support * total - 1e-9));
  struct Counted {
    std::vector<int> itemset;
    std::size_t count = 0;
    std::vector<std::size_t> by_target;
  };

  auto count = [&](std::vector<std::vector<int>> candidates) {
    std::vector<Counted> counted;
    counted.reserve(candidates.size());
    for (auto& c : candidates) counted.push_back({std::move(c), 0, std::vector<std::size_t>(targets.size(), 0)});
    for (const auto& tr : encoded)
      for (auto& c : counted)
        if (std::includes(tr.items.begin(), tr.items.end(), c.itemset.begin(), c.itemset.end())) {
          ++c.count;
          ++c.by_target[static_cast<std::size_t>(tr.target)];
        }
    std::erase_if(counted, [&](const Counted& c) { return c.count < std::max<std::size_t>(needed, 1); });
    return counted;
  };

  std::vector<AssociationRule> out;
  auto emit = [&](const std::vector<Counted>& level) {
    for (const auto& c : level)
      for (std::size_t t = 0; t < targets.size(); ++t) {
        const double conf = static_cast<double>(c.by_target[t]) / static_cast<double>(c.count);
        if (conf + 1e-12 < params.min_confidence) continue;
        AssociationRule rule;
        for (int id : c.itemset) rule.lhs.push_back(items[static_cast<std::size_t>(id)]);
        rule.rhs = targets[t];
        rule.support = static_cast<double>(c.count) / total;
        rule.confidence = conf;
        rule.count = c.count;
        out.push_back(std::move(rule));
      }
  };

  std::vector<std::vector<int>> singles;
  for (std::size_t i = 0; i < items.size(); ++i) singles.push_back({static_cast<int>(i)});
  auto level = count(std::move(singles));
  for (std::size_t k = 1;; ++k) {
    emit(level);
    if (k + 1 > params.max_length - 1 || level.size() < 2) break;
    std::set<std::vector<int>> frequent;
    for (const auto& c : level) frequent.insert(c.itemset);
    std::vector<std::vector<int>> candidates;
    for (std::size_t a = 0; a < level.size(); ++a)
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        const auto& x = level[a].itemset;
        const auto& y = level[b].itemset;
        if (!std::equal(x.begin(), x.end() - 1, y.begin())) continue;
        std::vector<int> joined = x;
        joined.push_back(y.back());
        if (joined[k - 1] > joined[k]) std::swap(joined[k - 1], joined[k]);
        bool all_frequent = true;
        for (std::size_t drop = 0; drop + 2 < joined.size() + 1 && all_frequent; ++drop) {
          std::vector<int> sub;
          for (std::size_t i = 0; i < joined.size(); ++i)
            if (i != drop) sub.push_back(joined[i]);
          all_frequent = frequent.count(sub) > 0;
        }
        if (all_frequent) candidates.push_back(std::move(joined));
      }
    level = count(std::move(candidates));
    if (level.empty()) break;
  }
  return out;
}

std::vector<AssociationRule> rank_interactions(std::vector<AssociationRule> rules,
                                               std::span<const InteractionKey> keys) {
  std::stable_sort(rules.begin(), rules.end(), [&](const AssociationRule& a, const AssociationRule& b) {
    for (auto key : keys) {
      switch (key) {
        case InteractionKey::support_desc:
          if (a.support != b.support) return a.support > b.support;
          break;
        case InteractionKey::confidence_desc:
          if (a.confidence != b.confidence) return a.confidence > b.confidence;
          break;
        case InteractionKey::length_desc:
          if (a.length() != b.length()) return a.length() > b.length();
          break;
      }
    }
    return false;
  });
  return rules;
}

std::string print_items(std::span<const Item> items, const Schema& schema, Naming naming) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += " & ";
    switch (item.kind) {
      case Item::Kind::term:
        out += print_condition(Condition{{item.term}}, schema, naming);
        break;
      case Item::Kind::variable:
        out += naming == Naming::indexed ? "X" + std::to_string(item.term.var + 1)
                                         : schema.predictors.at(item.term.var).name;
        break;
      case Item::Kind::target:
        out += schema.target.name + "=" + schema.format_outcome(item.outcome);
        break;
    }
  }
  return out;
}

void write_interaction_table(std::span<const AssociationRule> rules, const Schema& schema,
                             std::ostream& out, Naming naming) {
  out << "len,sup,conf,condition,pred\n";
  for (const auto& r : rules)
    out << r.lhs.size() << ',' << format_number(r.support) << ',' << format_number(r.confidence) << ','
        << print_items(r.lhs, schema, naming) << ',' << schema.format_outcome(r.rhs.outcome) << '\n';
}

}  // namespace treerules
