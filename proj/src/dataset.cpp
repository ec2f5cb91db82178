#include "treerules/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "treerules/error.hpp"
#include "treerules/random.hpp"
#include "treerules/text.hpp"

namespace treerules {

namespace {

bool valid_token(std::string_view token) {
  if (token.empty()) return false;
  return std::none_of(token.begin(), token.end(), [](char ch) {
    return std::isspace(static_cast<unsigned char>(ch)) || ch == ',' || ch == '{' || ch == '}' ||
           ch == '"' || ch == '\'';
  });
}

void validate_column(const ColumnSchema& col, std::span<const double> values) {
  if (col.categorical()) {
    if (col.levels.empty()) throw DataError("column '" + col.name + "' has no levels");
    for (std::size_t i = 0; i < col.levels.size(); ++i) {
      if (!valid_token(col.levels[i]))
        throw DataError("column '" + col.name + "': invalid level token '" + col.levels[i] + "'");
      for (std::size_t j = 0; j < i; ++j)
        if (col.levels[i] == col.levels[j])
          throw DataError("column '" + col.name + "': duplicate level '" + col.levels[i] + "'");
    }
    const auto levels = static_cast<double>(col.levels.size());
    for (double v : values)
      if (!(v >= 0 && v < levels && v == std::floor(v)))
        throw DataError("column '" + col.name + "': cell is not a level index");
  } else {
    for (double v : values)
      if (!std::isfinite(v)) throw DataError("column '" + col.name + "': non-finite value");
  }
}

}  // namespace

std::optional<std::size_t> ColumnSchema::find_level(std::string_view token) const {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i] == token) return i;
  return std::nullopt;
}

std::string Schema::format_outcome(double outcome) const {
  if (target.categorical()) return target.levels.at(static_cast<std::size_t>(outcome));
  return format_number(outcome);
}

double Schema::parse_outcome(std::string_view text) const {
  if (target.categorical()) {
    if (auto level = target.find_level(text)) return static_cast<double>(*level);
    throw DataError("unknown class '" + std::string(text) + "'");
  }
  auto value = parse_number(text);
  if (!value || !std::isfinite(*value))
    throw DataError("bad numeric outcome '" + std::string(text) + "'");
  return *value;
}

Dataset::Dataset(Schema schema, std::vector<std::vector<double>> columns, std::vector<double> target)
    : schema_(std::move(schema)), columns_(std::move(columns)), target_(std::move(target)) {
  if (columns_.size() != schema_.predictors.size())
    throw DataError("column count does not match schema");
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].size() != target_.size())
      throw DataError("column '" + schema_.predictors[j].name + "' has the wrong length");
    const auto& col = schema_.predictors[j];
    if (col.categorical() && col.levels.size() > kMaxLevels)
      throw DataError("column '" + col.name + "' has more than 32 levels");
    validate_column(col, columns_[j]);
  }
  validate_column(schema_.target, target_);
}

Instance Dataset::instance(std::size_t row) const {
  Instance x(columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) x[j] = columns_[j][row];
  return x;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<std::vector<double>> cols(columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    cols[j].reserve(rows.size());
    for (auto r : rows) cols[j].push_back(columns_[j].at(r));
  }
  std::vector<double> t;
  t.reserve(rows.size());
  for (auto r : rows) t.push_back(target_.at(r));
  return Dataset(schema_, std::move(cols), std::move(t));
}

Dataset Dataset::with_target(ColumnSchema target, std::vector<double> values) const {
  Schema s = schema_;
  s.target = std::move(target);
  return Dataset(std::move(s), columns_, std::move(values));
}

Instance Dataset::encode(std::span<const std::string> cells) const {
  if (cells.size() != columns_.size())
    throw DataError("instance has " + std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(columns_.size()));
  Instance x(cells.size());
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const auto& col = schema_.predictors[j];
    if (col.categorical()) {
      auto level = col.find_level(cells[j]);
      x[j] = level ? static_cast<double>(*level) : kUnknownLevel;
    } else {
      auto v = parse_number(cells[j]);
      if (!v || !std::isfinite(*v))
        throw DataError("column '" + col.name + "': bad number '" + cells[j] + "'");
      x[j] = *v;
    }
  }
  return x;
}

Dataset read_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> cells;  // column-major text
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    auto fields = split(text, ',');
    if (header.empty()) {
      for (auto f : fields) header.emplace_back(trim(f));
      cells.resize(header.size());
      continue;
    }
    if (fields.size() != header.size())
      throw DataError("row " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells, found " +
                      std::to_string(fields.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto cell = trim(fields[j]);
      if (cell.empty())
        throw DataError("row " + std::to_string(line_no) + ": empty cell in column '" +
                        header[j] + "'");
      if (cell.find_first_of("{}\"'") != std::string_view::npos)
        throw DataError("row " + std::to_string(line_no) + ": quote or brace in cell");
      cells[j].emplace_back(cell);
    }
  }
  if (header.empty()) throw DataError("empty file");
  if (header.size() < 2) throw DataError("need at least one predictor and a target");
  if (cells.front().empty()) throw DataError("file has a header but no rows");

  std::size_t target_col = header.size() - 1;
  if (options.target) {
    auto it = std::find(header.begin(), header.end(), *options.target);
    if (it == header.end()) throw DataError("no column named '" + *options.target + "'");
    target_col = static_cast<std::size_t>(it - header.begin());
  }

  Schema schema;
  std::vector<std::vector<double>> columns;
  std::vector<double> target;
  for (std::size_t j = 0; j < header.size(); ++j) {
    ColumnSchema col{header[j], ColumnKind::numeric, {}};
    std::vector<double> values;
    values.reserve(cells[j].size());
    bool numeric = true;
    for (const auto& c : cells[j]) {
      auto v = parse_number(c);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (auto it = options.kinds.find(header[j]); it != options.kinds.end()) {
      if (it->second == ColumnKind::numeric && !numeric)
        throw DataError("column '" + header[j] + "' is not numeric");
      numeric = it->second == ColumnKind::numeric;
    }
    if (numeric) {
      for (std::size_t r = 0; r < values.size(); ++r)
        if (!std::isfinite(values[r]))
          throw DataError("column '" + header[j] + "', data row " + std::to_string(r + 1) +
                          ": non-finite number");
    } else {
      col.kind = ColumnKind::categorical;
      values.clear();
      for (const auto& c : cells[j]) {
        auto level = col.find_level(c);
        if (!level) {
          col.levels.push_back(c);
          level = col.levels.size() - 1;
        }
        values.push_back(static_cast<double>(*level));
      }
    }
    if (j == target_col) {
      schema.target = std::move(col);
      target = std::move(values);
    } else {
      schema.predictors.push_back(std::move(col));
      columns.push_back(std::move(values));
    }
  }
  return Dataset(std::move(schema), std::move(columns), std::move(target));
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv(in, options);
}

void write_csv(const Dataset& d, std::ostream& out) {
  const auto& s = d.schema();
  auto cell = [](const ColumnSchema& col, double v) {
    return col.categorical() ? col.levels[static_cast<std::size_t>(v)] : format_number(v);
  };
  for (const auto& col : s.predictors) out << col.name << ',';
  out << s.target.name << '\n';
  for (std::size_t r = 0; r < d.num_rows(); ++r) {
    for (std::size_t j = 0; j < d.num_features(); ++j)
      out << cell(s.predictors[j], d.value(r, j)) << ',';
    out << cell(s.target, d.target()[r]) << '\n';
  }
}

Dataset discretize_target(const Dataset& d, std::size_t bins) {
  if (d.schema().target.categorical()) throw std::invalid_argument("target is not numeric");
  if (bins < 2) throw std::invalid_argument("need at least 2 bins");
  const auto t = d.target();
  const std::size_t n = t.size();
  if (n < bins) throw std::invalid_argument("fewer rows than bins");

  std::vector<double> distinct(t.begin(), t.end());
  std::sort(distinct.begin(), distinct.end());
  std::vector<std::size_t> counts;
  {
    std::vector<double> uniq;
    for (double v : distinct) {
      if (uniq.empty() || uniq.back() != v) {
        uniq.push_back(v);
        counts.push_back(0);
      }
      ++counts.back();
    }
    distinct = std::move(uniq);
  }
  const std::size_t groups = distinct.size();
  if (bins > groups)
    throw DataError("cannot form " + std::to_string(bins) + " bins from " +
                    std::to_string(groups) + " distinct target values");

  std::vector<std::size_t> bin_of(groups);
  std::size_t k = 0, cum = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t cut = (2 * (b + 1) * n + bins) / (2 * bins);  // round((b+1)n/bins)
    const std::size_t reserve = bins - 1 - b;
    do {
      bin_of[k] = b;
      cum += counts[k];
      ++k;
    } while (k < groups - reserve && cum < cut);
  }

  ColumnSchema target{d.schema().target.name, ColumnKind::categorical, {}};
  for (std::size_t b = 0; b < bins; ++b) target.levels.push_back("L" + std::to_string(b + 1));
  std::vector<double> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = std::lower_bound(distinct.begin(), distinct.end(), t[i]) - distinct.begin();
    labels[i] = static_cast<double>(bin_of[static_cast<std::size_t>(g)]);
  }
  return d.with_target(std::move(target), std::move(labels));
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train fraction must lie in (0,1)");
  if (n < 2) throw std::invalid_argument("need at least 2 rows to split");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction, std::uint64_t seed) {
  auto [train, test] = split_indices(d.num_rows(), train_fraction, seed);
  return {d.subset(train), d.subset(test)};
}

Dataset generate_team_data(std::size_t n, std::size_t p, std::size_t active, std::uint64_t seed) {
  if (p < 2) throw std::invalid_argument("team data needs at least 2 players");
  if (active > p) throw std::invalid_argument("more active players than players");
  Schema schema;
  for (std::size_t j = 0; j < p; ++j)
    schema.predictors.push_back({"X" + std::to_string(j + 1), ColumnKind::categorical, {"N", "Y"}});
  schema.target = {"T", ColumnKind::categorical, {"lose", "win"}};

  std::vector<std::vector<double>> columns(p, std::vector<double>(n, 0.0));
  std::vector<double> target(n);
  std::vector<std::size_t> players(p);
  Rng rng(seed);
  for (std::size_t r = 0; r < n; ++r) {
    std::iota(players.begin(), players.end(), 0);
    for (std::size_t k = 0; k < active; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, p - 1);
      std::swap(players[k], players[pick(rng)]);
      columns[players[k]][r] = 1.0;
    }
    const bool one = columns[0][r] == 1.0, two = columns[1][r] == 1.0;
    target[r] = (one != two) ? 1.0 : 0.0;
  }
  return Dataset(std::move(schema), std::move(columns), std::move(target));
}

}  // namespace treerules
