#include "treerules/condition.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "treerules/error.hpp"
#include "treerules/text.hpp"

namespace treerules {

namespace {

std::uint32_t all_levels(const ColumnSchema& col) {
  const auto n = col.levels.size();
  return n >= 32 ? 0xffffffffU : ((std::uint32_t{1} << n) - 1U);
}

class Parser {
 public:
  Parser(std::string_view text, const Schema& schema) : text_(text), schema_(schema) {}

  Condition parse() {
    Condition c;
    if (text_ == "TRUE") return c;
    while (true) {
      c.terms.push_back(term());
      if (pos_ == text_.size()) break;
      expect(" & ");
    }
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t at) const { throw ParseError(what, at); }
  [[noreturn]] void fail(const std::string& what) const { fail(what, pos_); }

  bool accept(std::string_view s) {
    if (text_.substr(pos_, s.size()) != s) return false;
    pos_ += s.size();
    return true;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "'");
  }

  Term term() {
    const std::size_t start = pos_;
    if (!accept("X")) fail("expected a variable 'X<index>'");
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) fail("expected a variable index");
    if (text_[digits] == '0') fail("variable index must be a positive integer", digits);
    std::size_t index = 0;
    for (std::size_t i = digits; i < pos_; ++i) {
      index = index * 10 + static_cast<std::size_t>(text_[i] - '0');
      if (index > schema_.num_features()) fail("unknown variable", start);
    }
    const std::size_t var = index - 1;
    const auto& col = schema_.predictors[var];

    const std::size_t op_at = pos_;
    if (accept(" in ")) {
      if (!col.categorical()) fail("set membership on numeric variable " + col.name, op_at);
      return Term::in(var, level_set(col));
    }
    Op op;
    if (accept(" <= ")) {
      op = Op::le;
    } else if (accept(" > ")) {
      op = Op::gt;
    } else {
      fail("expected ' in ', ' <= ' or ' > '");
    }
    if (col.categorical()) fail("comparison on categorical variable " + col.name, op_at);
    const std::size_t num_at = pos_;
    while (pos_ < text_.size() && text_[pos_] != ' ') ++pos_;
    auto value = parse_number(text_.substr(num_at, pos_ - num_at));
    if (!value || !std::isfinite(*value)) fail("expected a number", num_at);
    return op == Op::le ? Term::le(var, *value) : Term::gt(var, *value);
  }

  std::uint32_t level_set(const ColumnSchema& col) {
    expect("{");
    std::uint32_t mask = 0;
    while (true) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}') ++pos_;
      if (pos_ == start) fail("expected a level token");
      if (pos_ == text_.size()) fail("unterminated level set");
      const auto token = text_.substr(start, pos_ - start);
      auto level = col.find_level(token);
      if (!level) fail("unknown level '" + std::string(token) + "' for " + col.name, start);
      mask |= std::uint32_t{1} << *level;
      if (accept("}")) return mask;
      expect(",");
    }
  }

  std::string_view text_;
  const Schema& schema_;
  std::size_t pos_ = 0;
};

}  // namespace

bool Term::satisfied_by(double value) const noexcept {
  switch (op) {
    case Op::in_set:
      return value >= 0.0 && value < 32.0 && ((levels >> static_cast<int>(value)) & 1U);
    case Op::le:
      return value <= threshold;
    case Op::gt:
      return value > threshold;
  }
  return false;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (auto c = a.var <=> b.var; c != 0) return c;
  if (auto c = a.op <=> b.op; c != 0) return c;
  if (a.threshold < b.threshold) return std::strong_ordering::less;
  if (b.threshold < a.threshold) return std::strong_ordering::greater;
  return a.levels <=> b.levels;
}

bool Condition::satisfied_by(std::span<const double> x) const noexcept {
  return std::all_of(terms.begin(), terms.end(),
                     [&](const Term& t) { return t.satisfied_by(x[t.var]); });
}

std::optional<Condition> canonicalize(const Condition& c, const Schema& schema) {
  struct Bounds {
    std::uint32_t levels = 0xffffffffU;
    bool has_set = false;
    std::optional<double> le;
    std::optional<double> gt;
  };
  std::map<std::size_t, Bounds> by_var;
  for (const auto& t : c.terms) {
    if (t.var >= schema.num_features()) throw DataError("term on unknown variable");
    const bool categorical = schema.predictors[t.var].categorical();
    if (categorical != (t.op == Op::in_set))
      throw DataError("operator does not match the type of " + schema.predictors[t.var].name);
    auto& b = by_var[t.var];
    switch (t.op) {
      case Op::in_set:
        b.levels &= t.levels;
        b.has_set = true;
        break;
      case Op::le:
        b.le = b.le ? std::min(*b.le, t.threshold) : t.threshold;
        break;
      case Op::gt:
        b.gt = b.gt ? std::max(*b.gt, t.threshold) : t.threshold;
        break;
    }
  }
  Condition out;
  for (const auto& [var, b] : by_var) {
    if (b.has_set) {
      const auto all = all_levels(schema.predictors[var]);
      const auto mask = b.levels & all;
      if (mask == 0) return std::nullopt;
      if (mask != all) out.terms.push_back(Term::in(var, mask));
    }
    if (b.le && b.gt && !(*b.gt < *b.le)) return std::nullopt;
    if (b.le) out.terms.push_back(Term::le(var, *b.le));
    if (b.gt) out.terms.push_back(Term::gt(var, *b.gt));
  }
  return out;
}

Term complement(const Term& t, const Schema& schema) {
  switch (t.op) {
    case Op::in_set:
      return Term::in(t.var, all_levels(schema.predictors[t.var]) & ~t.levels);
    case Op::le:
      return Term::gt(t.var, t.threshold);
    case Op::gt:
      return Term::le(t.var, t.threshold);
  }
  return t;
}

std::vector<std::uint8_t> coverage(const Condition& c, const Dataset& d) {
  std::vector<std::uint8_t> mask(d.num_rows(), 1);
  for (const auto& t : c.terms) {
    const auto col = d.column(t.var);
    for (std::size_t r = 0; r < mask.size(); ++r)
      if (mask[r] && !t.satisfied_by(col[r])) mask[r] = 0;
  }
  return mask;
}

std::size_t count_covered(const Condition& c, const Dataset& d) {
  const auto mask = coverage(c, d);
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

std::string print_condition(const Condition& c, const Schema& schema, Naming naming) {
  if (c.empty()) return "TRUE";
  std::string out;
  for (std::size_t i = 0; i < c.terms.size(); ++i) {
    const auto& t = c.terms[i];
    const auto& col = schema.predictors.at(t.var);
    if (i) out += " & ";
    out += naming == Naming::indexed ? "X" + std::to_string(t.var + 1) : col.name;
    switch (t.op) {
      case Op::in_set: {
        out += " in {";
        bool first = true;
        for (std::size_t l = 0; l < col.levels.size(); ++l)
          if ((t.levels >> l) & 1U) {
            if (!first) out += ',';
            out += col.levels[l];
            first = false;
          }
        out += '}';
        break;
      }
      case Op::le:
        out += " <= " + format_number(t.threshold);
        break;
      case Op::gt:
        out += " > " + format_number(t.threshold);
        break;
    }
  }
  return out;
}

Condition parse_condition(std::string_view text, const Schema& schema) {
  Condition raw = Parser(text, schema).parse();
  auto canonical = canonicalize(raw, schema);
  if (!canonical) throw ParseError("condition can never be satisfied", 0);
  return std::move(*canonical);
}

}  // namespace treerules
