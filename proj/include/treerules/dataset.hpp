#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace treerules {

enum class ColumnKind { numeric, categorical };
enum class Task { classification, regression };

// Categorical cells are stored as the 0-based index of their level. An
// instance built from text with a level the schema has never seen carries
// this value instead.
inline constexpr double kUnknownLevel = -1.0;

// At most this many levels per categorical predictor; split points store the
// level subset as a bitmask.
inline constexpr std::size_t kMaxLevels = 32;

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::vector<std::string> levels;  // categorical only, first-appearance order

  bool categorical() const noexcept { return kind == ColumnKind::categorical; }
  std::optional<std::size_t> find_level(std::string_view token) const;

  friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;
};

struct Schema {
  std::vector<ColumnSchema> predictors;
  ColumnSchema target;

  std::size_t num_features() const noexcept { return predictors.size(); }
  Task task() const noexcept {
    return target.categorical() ? Task::classification : Task::regression;
  }

  // Renders an outcome (class index or numeric value) as text.
  std::string format_outcome(double outcome) const;
  // Inverse of format_outcome; throws DataError for unknown class tokens.
  double parse_outcome(std::string_view text) const;

  friend bool operator==(const Schema&, const Schema&) = default;
};

// Encoded predictor values of a single instance, one per schema predictor.
using Instance = std::vector<double>;

// Immutable column-major table. Construction validates every cell against
// the schema; afterwards the object is safe for concurrent reads.
class Dataset {
 public:
  Dataset(Schema schema, std::vector<std::vector<double>> columns, std::vector<double> target);

  const Schema& schema() const noexcept { return schema_; }
  Task task() const noexcept { return schema_.task(); }
  std::size_t num_rows() const noexcept { return target_.size(); }
  std::size_t num_features() const noexcept { return columns_.size(); }

  std::span<const double> column(std::size_t feature) const { return columns_.at(feature); }
  std::span<const double> target() const noexcept { return target_; }
  double value(std::size_t row, std::size_t feature) const { return columns_[feature][row]; }

  Instance instance(std::size_t row) const;
  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset with_target(ColumnSchema target, std::vector<double> values) const;

  // Encodes one row of text cells (predictors only). Unknown categorical
  // levels become kUnknownLevel; malformed numbers throw DataError.
  Instance encode(std::span<const std::string> cells) const;

 private:
  Schema schema_;
  std::vector<std::vector<double>> columns_;
  std::vector<double> target_;
};

struct CsvOptions {
  // Target column by name; the last column when unset.
  std::optional<std::string> target;
  // Forces the kind of named columns instead of inferring it.
  std::map<std::string, ColumnKind> kinds;
};

Dataset read_csv(std::istream& in, const CsvOptions& options = {});
Dataset load_csv(const std::string& path, const CsvOptions& options = {});
void write_csv(const Dataset& d, std::ostream& out);

// Replaces a numeric target with `bins` equal-frequency classes "L1".."Lbins".
// Runs of equal values are never split; a run straddling a cut goes to the
// lower bin, unless that would leave a later bin without any value.
Dataset discretize_target(const Dataset& d, std::size_t bins);

// Random train/test partition; train gets round(train_fraction * n) rows.
std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction, std::uint64_t seed);

// Row indices of the partition drawn by split(), in sampled order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed);

// Synthetic team data: `active` of p players (X1..Xp, levels N/Y) play in
// every row; T is "win" iff exactly one of X1, X2 plays, else "lose".
Dataset generate_team_data(std::size_t n, std::size_t p, std::size_t active, std::uint64_t seed);

}  // namespace treerules
