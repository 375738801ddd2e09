#include "amrgen/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "amrgen/agtsp.hpp"
#include "amrgen/corpus.hpp"
#include "amrgen/errors.hpp"
#include "amrgen/generator.hpp"
#include "amrgen/ngram_lm.hpp"
#include "amrgen/transition_model.hpp"

namespace amrgen::cli {

using json = nlohmann::json;

void Config::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(top_n >= 1, "top_n must be >= 1");
  require(order >= 1 && order <= 10, "order must be in [1, 10]");
  require(exact_limit <= 40, "exact_limit must be <= 40");
  require(epochs >= 1, "epochs must be >= 1");
  require(learning_rate > 0 && learning_rate <= 10, "learning_rate must be in (0, 10]");
  require(l2 >= 0, "l2 must be >= 0");
  require(max_reference_words >= 1, "max_reference_words must be >= 1");
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw FormatError("config " + path + ": expected a JSON object");

  Config c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "top_n") c.top_n = value.get<std::size_t>();
      else if (key == "order") c.order = value.get<int>();
      else if (key == "exact_limit") c.exact_limit = value.get<std::size_t>();
      else if (key == "negatives") c.negatives = value.get<std::size_t>();
      else if (key == "epochs") c.epochs = value.get<int>();
      else if (key == "learning_rate") c.learning_rate = value.get<double>();
      else if (key == "l2") c.l2 = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "restarts") c.restarts = value.get<std::size_t>();
      else if (key == "max_reference_words") c.max_reference_words = value.get<std::size_t>();
      else if (key == "lowercase") c.lowercase = value.get<bool>();
      else if (key == "baseline_bigram") c.baseline_bigram = value.get<bool>();
      else if (key == "skip_list") c.skip_list = value.get<std::set<std::string>>();
      else if (key == "rules") c.rules = value.get<std::string>();
      else if (key == "verbalizations") c.verbalizations = value.get<std::string>();
      else if (key == "lm") c.lm = value.get<std::string>();
      else if (key == "model") c.model = value.get<std::string>();
      else throw FormatError("config " + path + ": unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw FormatError("config " + path + ": " + e.what());
  }
  return c;
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config_path;
  std::string rules, verbalizations, lm, model;
  std::size_t top_n = 0, exact_limit = 0, negatives = 0, restarts = 0;
  int order = 0, epochs = 0;
  double learning_rate = 0, l2 = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> skip;
  bool baseline_bigram = false, verbose = false, abort_on_error = false;
};

struct Context {
  Config config;
  bool verbose = false;
  bool abort_on_error = false;
  std::ostream& out;
  std::ostream& err;
};

std::string require_path(const std::optional<std::string>& path, const char* flag) {
  if (!path) throw UsageError(std::string("missing ") + flag);
  return *path;
}

RuleBank load_bank(const Config& c) { return c.rules ? load_rules_file(*c.rules, c.top_n) : RuleBank(c.top_n); }

VerbalizationList load_verbs(const Config& c, std::ostream& err) {
  if (!c.verbalizations) return {};
  auto list = load_verbalizations_file(*c.verbalizations);
  if (list.skipped_lines) err << "warning: skipped " << list.skipped_lines << " verbalization lines\n";
  return list;
}

NgramLm load_lm(const Config& c) {
  NgramLm lm = NgramLm::read_arpa_file(require_path(c.lm, "--lm"));
  lm.set_lowercase(c.lowercase);
  return lm;
}

GeneratorConfig generator_config(const Config& c, std::ostream& err) {
  GeneratorConfig g;
  g.exact_group_limit = c.exact_limit;
  g.heuristic.seed = c.seed;
  g.heuristic.restarts = c.restarts;
  g.baseline_bigram = c.baseline_bigram;
  g.skip_list = c.skip_list;
  g.verbalizations = load_verbs(c, err);
  g.lowercase_eval = c.lowercase;
  g.max_reference_words = c.max_reference_words;
  return g;
}

TransitionModel load_model(const Config& c) {
  if (c.baseline_bigram && !c.model) return {};
  return TransitionModel::read_file(require_path(c.model, "--model"));
}

std::vector<AmrBlock> read_blocks(const std::string& path) {
  if (path == "-") return read_amr_bank(std::cin);
  return read_amr_bank_file(path);
}

std::string fixed2(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

// ---------------------------------------------------------------------------

int cmd_train_lm(Context& ctx, const std::string& corpus_path, const std::string& out_path) {
  std::ifstream in(corpus_path);
  if (!in) throw std::ios_base::failure("cannot open corpus " + corpus_path);
  std::vector<std::vector<std::string>> corpus;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = split_tokens(line);
    if (!toks.empty()) corpus.push_back(std::move(toks));
  }
  if (corpus.empty()) throw FormatError("corpus " + corpus_path + " has no sentences");

  const NgramLm lm = NgramLm::train(corpus, ctx.config.order, ctx.config.lowercase);
  lm.write_arpa_file(out_path);
  ctx.out << "sentences: " << corpus.size() << '\n';
  ctx.out << "vocabulary: " << lm.vocabulary_size() << '\n';
  const auto counts = lm.ngram_counts();
  for (std::size_t n = 0; n < counts.size(); ++n) ctx.out << "ngram " << n + 1 << '=' << counts[n] << '\n';
  return kSuccess;
}

int cmd_train_transitions(Context& ctx, const std::string& corpus_path, const std::string& out_path,
                          const std::string& examples_path) {
  const Config& c = ctx.config;
  const auto blocks = read_blocks(corpus_path);
  const RuleBank bank = load_bank(c);
  const NgramLm lm = load_lm(c);

  std::vector<TrainingPair> pairs;
  std::size_t unusable = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (!blocks[k].sentence) {
      ++unusable;
      continue;
    }
    try {
      pairs.push_back({parse_penman(blocks[k].penman), split_tokens(*blocks[k].sentence)});
    } catch (const ParseError& e) {
      if (ctx.abort_on_error) throw FormatError("block " + std::to_string(k + 1) + ": " + e.what());
      ctx.err << "block " << k + 1 << ": " << e.what() << '\n';
      ++unusable;
    }
  }

  MiningOptions mining;
  mining.negatives_per_positive = c.negatives;
  mining.seed = c.seed;
  mining.skip_list = c.skip_list;
  mining.verbalizations = load_verbs(c, ctx.err);
  mining.case_insensitive = c.lowercase;
  const MiningResult mined = mine_examples(pairs, bank, lm, mining);

  ctx.out << "pairs: " << blocks.size() << '\n';
  ctx.out << "pairs used: " << mined.pairs_used << '\n';
  ctx.out << "pairs skipped: " << mined.pairs_skipped + unusable << '\n';
  ctx.out << "positives: " << mined.positives << '\n';
  ctx.out << "negatives: " << mined.negatives << '\n';
  if (mined.positives == 0) throw TrainingError("no training signal: no pair has a complete gold cut");

  if (!examples_path.empty()) {
    std::ofstream tsv(examples_path);
    if (!tsv) throw std::ios_base::failure("cannot write " + examples_path);
    write_examples_tsv(tsv, mined.examples);
  }

  TrainingOptions opts;
  opts.l2 = c.l2;
  opts.epochs = c.epochs;
  opts.learning_rate = c.learning_rate;
  opts.seed = c.seed;
  TrainingReport report;
  const TransitionModel model = train_transition_model(mined.examples, opts, &report);
  model.write_file(out_path);

  std::ostringstream loss;
  loss << std::fixed << std::setprecision(6) << (report.losses.empty() ? 0.0 : report.losses.back());
  ctx.out << "epochs: " << report.losses.size() << '\n';
  ctx.out << "final loss: " << loss.str() << '\n';
  ctx.out << "training accuracy: " << fixed2(100.0 * report.accuracy) << "%\n";
  return kSuccess;
}

json diagnostics(std::size_t block, const GenerationResult& r) {
  json rules = json::array();
  for (const auto& m : r.used_rules) {
    rules.push_back({{"fragment", to_penman(m->rule->fragment)},
                     {"translation", join_tokens(m->translation())},
                     {"origin", to_string(m->rule->origin)}});
  }
  return {{"block", block}, {"cost", r.cost}, {"exact", r.exact}, {"tour", r.tour.nodes}, {"rules", rules}};
}

int cmd_generate(Context& ctx, const std::string& input, const std::string& dump_dir) {
  const Config& c = ctx.config;
  const auto blocks = read_blocks(input);
  const RuleBank bank = load_bank(c);
  const NgramLm lm = load_lm(c);
  const TransitionModel model = load_model(c);
  const GeneratorConfig gen = generator_config(c, ctx.err);
  if (!dump_dir.empty()) std::filesystem::create_directories(dump_dir);

  std::size_t failures = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const std::string where = "block " + std::to_string(k + 1) + " (line " + std::to_string(blocks[k].first_line) + ")";
    try {
      const AmrGraph graph = parse_penman(blocks[k].penman);
      const AgtspInstance instance = make_instance(graph, bank, model, lm, gen);
      if (!dump_dir.empty()) {
        std::ofstream tsv(dump_dir + "/block-" + std::to_string(k + 1) + ".tsv");
        if (!tsv) throw std::ios_base::failure("cannot write to " + dump_dir);
        instance.write_tsv(tsv);
      }
      const GenerationResult result = solve_and_decode(instance, graph.size(), gen);
      ctx.out << result.text() << '\n';
      if (ctx.verbose) ctx.err << diagnostics(k + 1, result).dump() << '\n';
    } catch (const ParseError& e) {
      if (ctx.abort_on_error) throw FormatError(where + ": " + e.what());
      ctx.err << where << ": " << e.what() << '\n';
      ctx.out << '\n';
      ++failures;
    } catch (const InfeasibleError& e) {
      if (ctx.abort_on_error) throw InfeasibleError(where + ": " + e.what());
      ctx.err << where << ": " << e.what() << '\n';
      ctx.out << '\n';
      ++failures;
    }
  }
  if (failures) ctx.err << "warning: " << failures << " of " << blocks.size() << " blocks failed\n";
  return kSuccess;
}

int cmd_evaluate(Context& ctx, const std::string& input, const std::string& output_path) {
  const Config& c = ctx.config;
  const auto blocks = read_blocks(input);
  if (std::none_of(blocks.begin(), blocks.end(), [](const AmrBlock& b) { return b.sentence.has_value(); })) {
    throw FormatError("corpus " + input + " has no '# ::snt' references");
  }
  const RuleBank bank = load_bank(c);
  const NgramLm lm = load_lm(c);
  const TransitionModel model = load_model(c);
  const GeneratorConfig gen = generator_config(c, ctx.err);

  const EvaluationReport report = evaluate_corpus(blocks, bank, model, lm, gen);
  if (!output_path.empty()) {
    std::ofstream hyp(output_path);
    if (!hyp) throw std::ios_base::failure("cannot write " + output_path);
    for (const auto& s : report.outputs) hyp << s << '\n';
  }
  ctx.out << "instances: " << report.total << '\n';
  ctx.out << "filtered: " << report.filtered << '\n';
  ctx.out << "evaluated: " << report.evaluated << '\n';
  ctx.out << "BLEU: " << fixed2(report.bleu) << '\n';
  ctx.out << "induced concept coverage: " << fixed2(report.concept_coverage()) << "%\n";
  ctx.out << "induced graph coverage: " << fixed2(report.graph_coverage()) << "%\n";
  return kSuccess;
}

int cmd_oracle(Context& ctx, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  const AgtspInstance instance = AgtspInstance::read_tsv(in);
  const Tour brute = solve_brute_force(instance);
  ctx.out << "groups: " << instance.ordinary_group_count() << '\n';
  ctx.out << "brute-force cost: " << to_string(brute.total) << '\n';
  ctx.out << "brute-force tour:";
  for (std::size_t n : brute.nodes) ctx.out << ' ' << n;
  ctx.out << '\n';
  if (instance.ordinary_group_count() <= ctx.config.exact_limit) {
    const Tour dp = solve_exact(instance, ctx.config.exact_limit);
    ctx.out << "exact cost: " << to_string(dp.total) << '\n';
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"AMR-to-text generation by ordering rule translations as an asymmetric generalized TSP", "amrgen"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config_path, "JSON config file; flags override its values");
  auto* o_rules = app.add_option("--rules", f.rules, "rule file (FRAGMENT ||| translation ||| COUNT)");
  auto* o_verbs = app.add_option("--verbalizations", f.verbalizations, "verbalization list");
  auto* o_lm = app.add_option("--lm", f.lm, "ARPA language model");
  auto* o_model = app.add_option("--model", f.model, "transition model file");
  auto* o_top = app.add_option("--top-n", f.top_n, "translations kept per fragment");
  auto* o_order = app.add_option("--order", f.order, "n-gram order");
  auto* o_seed = app.add_option("--seed", f.seed, "seed for sampling and search");
  auto* o_exact = app.add_option("--exact-limit", f.exact_limit, "largest group count solved exactly");
  auto* o_neg = app.add_option("--negatives", f.negatives, "negatives sampled per positive transition");
  auto* o_epochs = app.add_option("--epochs", f.epochs, "training epochs");
  auto* o_lr = app.add_option("--learning-rate", f.learning_rate, "gradient descent step size");
  auto* o_l2 = app.add_option("--l2", f.l2, "L2 regularization strength");
  auto* o_restarts = app.add_option("--restarts", f.restarts, "heuristic solver restarts");
  auto* o_skip = app.add_option("--skip", f.skip, "concepts that translate to nothing (replaces the default list)");
  auto* o_bigram = app.add_flag("--baseline-bigram", f.baseline_bigram, "score transitions with a bigram LM only");
  app.add_flag("--verbose", f.verbose, "JSON-lines diagnostics on stderr");
  app.add_flag("--abort-on-error", f.abort_on_error, "stop at the first bad block");

  std::string corpus, input, out_path, examples_path, dump_dir, output_path, tsv_path;
  auto* train_lm = app.add_subcommand("train-lm", "train an n-gram LM and write it as ARPA");
  train_lm->add_option("corpus", corpus, "one whitespace-tokenized sentence per line")->required();
  train_lm->add_option("--out,-o", out_path, "output ARPA file")->required();

  auto* train_tr = app.add_subcommand("train-transitions", "mine transitions and train the maxent model");
  train_tr->add_option("corpus", corpus, "AMR bank with '# ::snt' references")->required();
  train_tr->add_option("--out,-o", out_path, "output model file")->required();
  train_tr->add_option("--examples", examples_path, "also write mined examples as TSV");

  auto* gen = app.add_subcommand("generate", "generate one sentence per AMR block");
  gen->add_option("input", input, "AMR bank file, or - for stdin")->required();
  gen->add_option("--dump-instances", dump_dir, "write each AGTSP instance as TSV into this directory");

  auto* eval = app.add_subcommand("evaluate", "generate and score against '# ::snt' references");
  eval->add_option("input", input, "AMR bank with references")->required();
  eval->add_option("--output", output_path, "write hypotheses here");

  auto* oracle = app.add_subcommand("oracle", "solve a dumped AGTSP instance by brute force");
  oracle->add_option("instance", tsv_path, "TSV dump from generate --dump-instances")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }

  try {
    Context ctx{f.config_path.empty() ? Config{} : load_config(f.config_path), f.verbose, f.abort_on_error, out, err};
    Config& c = ctx.config;
    if (o_rules->count()) c.rules = f.rules;
    if (o_verbs->count()) c.verbalizations = f.verbalizations;
    if (o_lm->count()) c.lm = f.lm;
    if (o_model->count()) c.model = f.model;
    if (o_top->count()) c.top_n = f.top_n;
    if (o_order->count()) c.order = f.order;
    if (o_seed->count()) c.seed = f.seed;
    if (o_exact->count()) c.exact_limit = f.exact_limit;
    if (o_neg->count()) c.negatives = f.negatives;
    if (o_epochs->count()) c.epochs = f.epochs;
    if (o_lr->count()) c.learning_rate = f.learning_rate;
    if (o_l2->count()) c.l2 = f.l2;
    if (o_restarts->count()) c.restarts = f.restarts;
    if (o_skip->count()) c.skip_list = SkipList(f.skip.begin(), f.skip.end());
    if (o_bigram->count()) c.baseline_bigram = true;
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }

    if (*train_lm) return cmd_train_lm(ctx, corpus, out_path);
    if (*train_tr) return cmd_train_transitions(ctx, corpus, out_path, examples_path);
    if (*gen) return cmd_generate(ctx, input, dump_dir);
    if (*eval) return cmd_evaluate(ctx, input, output_path);
    if (*oracle) return cmd_oracle(ctx, tsv_path);
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::ios_base::failure& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const FormatError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const TrainingError& e) {
    err << "training failed: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace amrgen::cli
