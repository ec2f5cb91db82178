#pragma once

#include <sstream>
#include <string>

#include "treerules/dataset.hpp"
#include "treerules/random.hpp"
#include "treerules/trees.hpp"

namespace testing {

// The team dataset whose counts match the worked example tables.
inline constexpr std::uint64_t kTeamSeed = 885228;

inline treerules::Dataset team() { return treerules::generate_team_data(100, 20, 10, kTeamSeed); }

inline treerules::Dataset csv(const std::string& text, const treerules::CsvOptions& options = {}) {
  std::istringstream in(text);
  return treerules::read_csv(in, options);
}

// Level index of `token` in predictor `var` (0-based).
inline double level(const treerules::Dataset& d, std::size_t var, const std::string& token) {
  return static_cast<double>(d.schema().predictors.at(var).find_level(token).value());
}

inline std::uint32_t bit(const treerules::Dataset& d, std::size_t var, const std::string& token) {
  return std::uint32_t{1} << static_cast<int>(level(d, var, token));
}

// Mixed-type random data: numeric X1..X3 (X3 coarse, many ties) and
// categorical X4 (4 levels), X5 (2 levels); binary or numeric target.
inline treerules::Dataset random_mixed(std::size_t n, std::uint64_t seed, bool regression = false) {
  using namespace treerules;
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> four(0, 3), two(0, 1), coarse(0, 4);
  Schema s;
  s.predictors = {{"X1", ColumnKind::numeric, {}},
                  {"X2", ColumnKind::numeric, {}},
                  {"X3", ColumnKind::numeric, {}},
                  {"X4", ColumnKind::categorical, {"a", "b", "c", "d"}},
                  {"X5", ColumnKind::categorical, {"p", "q"}}};
  s.target = regression ? ColumnSchema{"T", ColumnKind::numeric, {}}
                        : ColumnSchema{"T", ColumnKind::categorical, {"no", "yes"}};
  std::vector<std::vector<double>> cols(5, std::vector<double>(n));
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    cols[0][i] = std::round(u(rng) * 1000.0) / 100.0;
    cols[1][i] = std::round(u(rng) * 1000.0) / 100.0;
    cols[2][i] = coarse(rng);
    cols[3][i] = four(rng);
    cols[4][i] = two(rng);
    const double signal = (cols[0][i] > 5.0 ? 1.0 : 0.0) + (cols[3][i] == 1 ? 1.0 : 0.0) + 0.3 * u(rng);
    t[i] = regression ? signal * 3.0 + cols[2][i] : (signal > 1.0 ? 1.0 : 0.0);
  }
  return Dataset(std::move(s), std::move(cols), std::move(t));
}

}  // namespace testing
