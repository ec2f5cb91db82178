// Command-line front end: one subcommand per pipeline stage plus bench.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "treerules/error.hpp"
#include "treerules/pipeline.hpp"
#include "treerules/random.hpp"
#include "treerules/report.hpp"
#include "treerules/text.hpp"

namespace tr = treerules;

namespace {

constexpr std::uint64_t kTeamSeed = 885228;

struct DataOptions {
  std::string data;
  std::string target;
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("-d,--data", o.data,
                  "CSV file, or a bundled dataset: team, iris, tictactoe, breast")
      ->required();
  cmd->add_option("--target", o.target, "target column (default: last)");
}

std::string bundled_path(const std::string& name) {
  const char* dir = std::getenv("TREERULES_DATA");
  return std::string(dir ? dir : TREERULES_DATA_DIR) + "/" + name + ".csv";
}

tr::Dataset load(const DataOptions& o) {
  if (o.data == "team") return tr::generate_team_data(100, 20, 10, kTeamSeed);
  tr::CsvOptions csv;
  if (!o.target.empty()) csv.target = o.target;
  if (!std::filesystem::exists(o.data) && o.data.find('/') == std::string::npos &&
      std::filesystem::exists(bundled_path(o.data)))
    return tr::load_csv(bundled_path(o.data), csv);
  return tr::load_csv(o.data, csv);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tr::DataError("cannot open '" + path + "'");
  return in;
}

// Writes to the named file, or stdout when the name is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw tr::DataError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

tr::Format parse_format(const std::string& s) { return s == "pretty" ? tr::Format::pretty : tr::Format::csv; }

std::vector<tr::RankKey> parse_rank(const std::vector<std::string>& keys) {
  static const std::map<std::string, tr::RankKey> names{
      {"err", tr::RankKey::err_asc}, {"freq", tr::RankKey::freq_desc}, {"len", tr::RankKey::len_asc}};
  std::vector<tr::RankKey> out;
  for (const auto& k : keys) out.push_back(names.at(k));
  return out;
}

std::vector<tr::InteractionKey> parse_interaction_rank(const std::vector<std::string>& keys) {
  static const std::map<std::string, tr::InteractionKey> names{{"support", tr::InteractionKey::support_desc},
                                                              {"confidence", tr::InteractionKey::confidence_desc},
                                                              {"length", tr::InteractionKey::length_desc}};
  std::vector<tr::InteractionKey> out;
  for (const auto& k : keys) out.push_back(names.at(k));
  return out;
}

std::vector<tr::Rule> read_rules(const std::string& path, const tr::Schema& schema) {
  auto in = open_in(path);
  return tr::read_rule_table(in, schema);
}

struct ForestOptions {
  std::size_t trees = 100;
  std::optional<std::size_t> mtry, min_leaf, max_leaves;
  std::optional<double> penalty;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  bool no_bootstrap = false;

  tr::ForestParams params(std::size_t p) const {
    tr::ForestParams f;
    f.n_trees = trees;
    f.mtry = mtry;
    f.min_leaf = min_leaf;
    f.max_leaves = max_leaves;
    f.seed = seed;
    f.threads = threads;
    f.bootstrap = !no_bootstrap;
    if (penalty) f.penalties.assign(p, *penalty);
    return f;
  }
};

void add_forest_options(CLI::App* cmd, ForestOptions& o) {
  cmd->add_option("--trees", o.trees, "number of trees")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--mtry", o.mtry, "features tried per split");
  cmd->add_option("--min-leaf", o.min_leaf, "minimum rows per leaf");
  cmd->add_option("--max-leaves", o.max_leaves, "maximum leaves per tree");
  cmd->add_option("--penalty", o.penalty, "regularized forest: one penalty coefficient for every feature")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads (0: all cores)")->capture_default_str();
  cmd->add_flag("--no-bootstrap", o.no_bootstrap, "grow every tree on all rows");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule extraction, pruning, selection and summarization for tree ensembles"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; options of a subcommand go under [subcommand]");
  std::string format_name = "csv";
  app.add_option("--format", format_name, "csv or pretty")
      ->check(CLI::IsMember({"csv", "pretty"}))
      ->capture_default_str();
  std::string output;
  app.add_option("-o,--output", output, "output file (default: stdout)");

  // generate
  auto* generate = app.add_subcommand("generate", "write the synthetic team dataset");
  std::size_t gen_n = 100, gen_p = 20, gen_active = 10;
  std::uint64_t gen_seed = kTeamSeed;
  generate->add_option("--rows", gen_n)->capture_default_str();
  generate->add_option("--players", gen_p)->capture_default_str();
  generate->add_option("--active", gen_active)->capture_default_str();
  generate->add_option("--seed", gen_seed)->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "grow a forest and write its node tables");
  DataOptions train_data;
  ForestOptions train_forest;
  add_data_options(train, train_data);
  add_forest_options(train, train_forest);

  // extract
  auto* extract = app.add_subcommand("extract", "extract conditions (or leaf rules) from node tables");
  DataOptions extract_data;
  std::string extract_forest;
  int max_depth = 6;
  std::size_t cap = 0;
  std::uint64_t extract_seed = 1;
  bool leaf_rules = false, no_dedup = false;
  add_data_options(extract, extract_data);
  extract->add_option("--forest", extract_forest, "node-table CSV written by train")->required();
  extract->add_option("--max-depth", max_depth, "root is depth 1; -1 for no limit")->capture_default_str();
  extract->add_option("--cap", cap, "sample at most this many conditions (0: keep all)")->capture_default_str();
  extract->add_option("--seed", extract_seed, "seed of the cap sample")->capture_default_str();
  extract->add_flag("--rules", leaf_rules, "write leaf rules with tree outcomes, measured on the data");
  extract->add_flag("--no-dedup", no_dedup, "keep repeated conditions");

  // measure
  auto* measure = app.add_subcommand("measure", "assign outcomes to conditions and measure the rules");
  DataOptions measure_data;
  std::string measure_conditions, measure_rules;
  std::vector<std::string> measure_rank;
  add_data_options(measure, measure_data);
  auto* mc = measure->add_option("--conditions", measure_conditions, "condition CSV");
  auto* mr = measure->add_option("--rules", measure_rules, "rule table to re-measure with its outcomes");
  mc->excludes(mr);
  measure->add_option("--rank", measure_rank, "sort keys: err, freq, len")
      ->delimiter(',')
      ->check(CLI::IsMember({"err", "freq", "len"}));

  // prune
  auto* prune = app.add_subcommand("prune", "drop terms whose removal barely changes the error");
  DataOptions prune_data;
  std::string prune_rules, prune_mode = "relative", trace_path;
  double prune_threshold = 0.05, prune_s = 1e-6;
  add_data_options(prune, prune_data);
  prune->add_option("--rules", prune_rules, "rule table")->required();
  prune->add_option("--mode", prune_mode, "relative or absolute decay")
      ->check(CLI::IsMember({"relative", "absolute"}))
      ->capture_default_str();
  prune->add_option("--threshold", prune_threshold)->capture_default_str()->check(CLI::NonNegativeNumber);
  prune->add_option("--s", prune_s, "floor of the relative-decay denominator")->capture_default_str();
  prune->add_option("--trace", trace_path, "write the per-term decay log here");
  bool prune_dedup = false;
  prune->add_flag("--dedup", prune_dedup, "drop rules whose pruned condition repeats an earlier one");

  // select
  auto* select = app.add_subcommand("select", "pick a compact condition subset with a guided regularized forest");
  DataOptions select_data;
  std::string select_rules;
  tr::SelectionParams selection;
  bool no_rescore = false;
  add_data_options(select, select_data);
  select->add_option("--rules", select_rules, "rule table")->required();
  select->add_option("--lambda0", selection.lambda0)->capture_default_str();
  select->add_option("--gamma", selection.gamma, "weight of the length penalty")->capture_default_str();
  select->add_option("--beta", selection.beta, "weight of global importance")->capture_default_str();
  select->add_option("--trees", selection.forest.n_trees)->capture_default_str();
  select->add_option("--mtry", selection.forest.mtry, "default: every indicator column");
  select->add_option("--max-leaves", selection.forest.max_leaves);
  select->add_option("--seed", selection.forest.seed)->capture_default_str();
  select->add_flag("--no-rescore", no_rescore, "score with the guided forest instead of a fresh one");

  // mine
  auto* mine = app.add_subcommand("mine", "frequent variable interactions in a rule set");
  DataOptions mine_data;
  std::string mine_rules;
  tr::MiningParams mining;
  bool numeric_as_variable = false;
  std::size_t min_items = 1, top = 0;
  std::vector<std::string> mine_rank{"support", "confidence"};
  add_data_options(mine, mine_data);
  mine->add_option("--rules", mine_rules, "rule table")->required();
  mine->add_option("--min-support", mining.min_support)->capture_default_str();
  mine->add_option("--min-confidence", mining.min_confidence)->capture_default_str();
  mine->add_option("--max-length", mining.max_length, "items including the target")->capture_default_str();
  mine->add_option("--min-items", min_items, "report conditions with at least this many items")
      ->capture_default_str();
  mine->add_option("--top", top, "report only the first N (0: all)")->capture_default_str();
  mine->add_option("--rank", mine_rank, "sort keys: support, confidence, length")
      ->delimiter(',')
      ->check(CLI::IsMember({"support", "confidence", "length"}))
      ->capture_default_str();
  mine->add_flag("--numeric-as-variable", numeric_as_variable, "numeric terms become bare-variable items");

  // stel
  auto* stel = app.add_subcommand("stel", "summarize rules into an ordered rule list");
  DataOptions stel_data;
  std::string stel_rules;
  double stel_threshold = 0.01;
  add_data_options(stel, stel_data);
  stel->add_option("--rules", stel_rules, "rule table")->required();
  stel->add_option("--threshold", stel_threshold, "minimum rule frequency")->capture_default_str();

  // predict
  auto* predict = app.add_subcommand("predict", "apply a rule list to a dataset");
  DataOptions predict_data;
  std::string model;
  add_data_options(predict, predict_data);
  predict->add_option("--model", model, "rule list CSV written by stel")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "rule list against a single tree over repeated random splits");
  DataOptions bench_data;
  tr::BenchConfig bench_config;
  ForestOptions bench_forest;
  add_data_options(bench, bench_data);
  bench->add_option("--runs", bench_config.runs)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--train-fraction", bench_config.train_fraction)->capture_default_str();
  bench->add_option("--max-depth", bench_config.pipeline.max_depth)->capture_default_str();
  bench->add_option("--cap", bench_config.pipeline.max_conditions)->capture_default_str();
  bench->add_option("--prune-threshold", bench_config.pipeline.prune.threshold)->capture_default_str();
  bench->add_option("--stel-threshold", bench_config.pipeline.stel_threshold)->capture_default_str();
  bench->add_option("--cart-min-leaf", bench_config.cart_min_leaf)->capture_default_str();
  bench->add_option("--trees", bench_forest.trees)->capture_default_str();
  bench->add_option("--mtry", bench_forest.mtry);
  bench->add_option("--seed", bench_forest.seed)->capture_default_str();
  bench->add_option("--threads", bench_config.threads, "concurrent runs (0: all cores)")->capture_default_str();
  bool bench_runs = false;
  bench->add_flag("--per-run", bench_runs, "also list every run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const tr::Format format = parse_format(format_name);
  try {
    Output out(output);
    std::ostream& os = out.stream();

    if (*generate) {
      tr::write_csv(tr::generate_team_data(gen_n, gen_p, gen_active, gen_seed), os);
    } else if (*train) {
      const auto d = load(train_data);
      const auto e = tr::build_forest(d, train_forest.params(d.num_features()));
      tr::write_node_tables(e, os);
      if (e.oob_error) std::cerr << "oob error " << tr::format_number(*e.oob_error) << '\n';
    } else if (*extract) {
      const auto d = load(extract_data);
      const auto e = tr::import_node_tables(extract_forest, d.schema());
      if (leaf_rules) {
        auto set = tr::extract_rules(e);
        for (const auto& w : set.warnings) std::cerr << "warning: " << w << '\n';
        for (auto& r : set.rules) r.metrics = tr::measure(r, d);
        if (!no_dedup) set.rules = tr::dedup_rules(std::move(set.rules));
        tr::report_rules(set.rules, d.schema(), format, os);
      } else {
        std::vector<std::string> warnings;
        auto conds = tr::sample_conditions(tr::extract_conditions(e, max_depth, &warnings), cap,
                                           tr::derive_seed(extract_seed, 1));
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
        if (!no_dedup) conds = tr::dedup(std::move(conds));
        tr::write_conditions(conds, d.schema(), os);
      }
    } else if (*measure) {
      const auto d = load(measure_data);
      std::vector<tr::Rule> rules;
      if (!measure_rules.empty()) {
        rules = read_rules(measure_rules, d.schema());
        for (auto& r : rules) r.metrics = tr::measure(r, d);
      } else if (!measure_conditions.empty()) {
        auto in = open_in(measure_conditions);
        const auto conds = tr::read_conditions(in, d.schema());
        auto assigned = tr::assign_outcomes(conds, d);
        if (!assigned.uncovered.empty())
          std::cerr << "warning: " << assigned.uncovered.size() << " conditions cover no row and were dropped\n";
        rules = std::move(assigned.rules);
      } else {
        throw CLI::ValidationError("measure needs --conditions or --rules");
      }
      if (!measure_rank.empty()) rules = tr::rank_rules(std::move(rules), parse_rank(measure_rank));
      tr::report_rules(rules, d.schema(), format, os);
    } else if (*prune) {
      const auto d = load(prune_data);
      const auto rules = read_rules(prune_rules, d.schema());
      tr::PruneParams params;
      params.mode = prune_mode == "absolute" ? tr::DecayMode::absolute : tr::DecayMode::relative;
      params.threshold = prune_threshold;
      params.s = prune_s;
      std::vector<tr::Rule> pruned;
      std::optional<Output> trace;
      if (!trace_path.empty()) {
        trace.emplace(trace_path);
        trace->stream() << "rule,term,removed_term,error,error_without,decay,removed\n";
      }
      for (std::size_t i = 0; i < rules.size(); ++i) {
        auto result = tr::prune_rule_traced(rules[i], d, params);
        if (trace)
          for (const auto& s : result.steps)
            trace->stream() << i + 1 << ',' << s.term + 1 << ','
                            << tr::print_condition(tr::Condition{{s.removed_term}}, d.schema()) << ','
                            << tr::format_number(s.error) << ',' << tr::format_number(s.error_without) << ','
                            << tr::format_number(s.decay) << ',' << (s.removed ? 1 : 0) << '\n';
        pruned.push_back(std::move(result.rule));
      }
      if (prune_dedup) pruned = tr::dedup_rules(std::move(pruned));
      tr::report_rules(pruned, d.schema(), format, os);
    } else if (*select) {
      const auto d = load(select_data);
      const auto rules = read_rules(select_rules, d.schema());
      std::vector<tr::Condition> conds;
      for (const auto& r : rules) conds.push_back(r.condition);
      selection.rescore = !no_rescore;
      const auto chosen = tr::select_conditions(conds, d, selection);
      std::vector<tr::Rule> picked;
      for (auto i : chosen.indices) {
        auto r = rules[i];
        r.metrics = tr::measure(r, d);
        picked.push_back(std::move(r));
      }
      tr::report_selected(picked, chosen.scores, d.schema(), format, os);
    } else if (*mine) {
      const auto d = load(mine_data);
      const auto rules = read_rules(mine_rules, d.schema());
      auto found = tr::mine(tr::itemize(rules, d.schema(), numeric_as_variable), mining);
      std::erase_if(found, [&](const tr::AssociationRule& r) { return r.lhs.size() < min_items; });
      found = tr::rank_interactions(std::move(found), parse_interaction_rank(mine_rank));
      if (top && found.size() > top) found.resize(top);
      tr::report_interactions(found, d.schema(), format, os);
    } else if (*stel) {
      const auto d = load(stel_data);
      auto rules = read_rules(stel_rules, d.schema());
      for (auto& r : rules) r.metrics = tr::measure(r, d);
      tr::report_rule_list(tr::build_stel(rules, d, stel_threshold), d.schema(), format, os);
    } else if (*predict) {
      const auto d = load(predict_data);
      auto in = open_in(model);
      const auto list = tr::read_rule_list(in, d.schema());
      os << "row,pred\n";
      for (std::size_t i = 0; i < d.num_rows(); ++i)
        os << i + 1 << ',' << d.schema().format_outcome(tr::predict(list, d.instance(i))) << '\n';
      std::cerr << (d.task() == tr::Task::classification ? "error rate " : "mse ")
                << tr::format_number(tr::evaluate(list, d)) << '\n';
    } else if (*bench) {
      const auto d = load(bench_data);
      bench_config.pipeline.forest = bench_forest.params(d.num_features());
      bench_config.pipeline.seed = bench_forest.seed;
      const auto r = tr::run_bench(d, bench_config);
      const bool pretty = format == tr::Format::pretty;
      auto num = [&](double v) { return pretty ? tr::pretty_number(v) : tr::format_number(v); };
      auto table = [&](const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
        if (pretty) return tr::print_aligned(header, rows, os);
        os << tr::join(header, ",") << '\n';
        for (const auto& row : rows) os << tr::join(row, ",") << '\n';
      };
      if (bench_runs) {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < r.runs.size(); ++i)
          rows.push_back({std::to_string(i + 1), num(r.runs[i].stel_error), num(r.runs[i].cart_error),
                          std::to_string(r.runs[i].stel_rules)});
        table({"run", "stel_error", "cart_error", "stel_rules"}, rows);
        os << '\n';
      }
      table({"dataset", "runs", "stel_error", "cart_error", "rel_diff", "t", "seconds"},
            {{bench_data.data, std::to_string(r.runs.size()), num(r.stel_mean), num(r.cart_mean),
              num(r.relative_difference), std::isnan(r.t_statistic) ? "NA" : num(r.t_statistic),
              num(r.seconds)}});
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const tr::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
