#include "cuelearn/cli.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cuelearn/baselines.hpp"
#include "cuelearn/corpus.hpp"
#include "cuelearn/error.hpp"
#include "cuelearn/evaluator.hpp"
#include "cuelearn/rules.hpp"
#include "cuelearn/schema.hpp"
#include "cuelearn/tree.hpp"

namespace cuelearn::cli {

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(Errc::Io, "write failed for " + path);
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// A model file is a rule list iff it carries a default line; trees never do.
bool looks_like_rules(const std::string& text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text.compare(pos, 11, "default is ") == 0) return true;
    pos = text.find('\n', pos);
    if (pos == std::string::npos) break;
    ++pos;
  }
  return false;
}

Model labeler_from_spec(const std::string& spec) {
  if (spec == "prosodic") return prosodic_model;
  if (spec == "textual") return textual_model;
  if (spec == "majority") return majority_model;
  if (spec.rfind("rules:", 0) == 0) {
    auto rl = std::make_shared<RuleList>(parse_rules(read_text(spec.substr(6))));
    return [rl](const Example& e) { return classify_rules(*rl, e); };
  }
  throw Error(Errc::InvalidSpec,
              "labeler must be prosodic, textual, majority, or rules:<path>");
}

BaselineDecision (*baseline_by_name(const std::string& name))(const Example&) {
  if (name == "prosodic") return prosodic_decision;
  if (name == "textual") return textual_decision;
  if (name == "majority") return majority_decision;
  throw Error(Errc::InvalidSpec, "model must be prosodic, textual, or majority");
}

Model model_from_file(const std::string& path) {
  const std::string text = read_text(path);
  if (looks_like_rules(text)) {
    auto rl = std::make_shared<RuleList>(parse_rules(text));
    return [rl](const Example& e) { return classify_rules(*rl, e); };
  }
  std::shared_ptr<TreeNode> t = parse_tree(text);
  return [t](const Example& e) { return classify_tree(*t, e); };
}

void print_eval(const EvalResult& r) {
  std::cout << "n: " << r.n << "\n"
            << "misclassified_discourse: " << r.misclassified_discourse << "\n"
            << "misclassified_sentential: " << r.misclassified_sentential << "\n"
            << "error_rate: " << shortest(r.error) << "\n";
}

unsigned worker_count(std::size_t tasks) {
  unsigned t = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("CUE_THREADS")) {
    char* end = nullptr;
    const unsigned long parsed = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && parsed >= 1) t = static_cast<unsigned>(parsed);
  }
  if (t < 1) t = 1;
  if (tasks < t) t = static_cast<unsigned>(tasks);
  return t;
}

// --- explain rendering: the on-disk grammar with descriptive names ---

void explain_tree_node(const TreeNode& n, std::size_t depth, std::string& out);

void explain_tree_child(const TreeNode& child, std::size_t depth, std::string& out) {
  if (child.kind == TreeNode::Kind::Leaf) {
    out += ' ';
    out += class_name(child.leaf_class);
    out += '\n';
  } else {
    out += '\n';
    explain_tree_node(child, depth + 1, out);
  }
}

void explain_tree_node(const TreeNode& n, std::size_t depth, std::string& out) {
  const std::string indent(depth * 2, ' ');
  const std::string name(long_name(n.feature));
  if (n.kind == TreeNode::Kind::NumericTest) {
    out += indent + "if " + name + " <= " + std::to_string(n.threshold) + " then";
    explain_tree_child(*n.le_child, depth, out);
    out += indent + "elseif " + name + " > " + std::to_string(n.threshold) + " then";
    explain_tree_child(*n.gt_child, depth, out);
  } else {
    for (std::size_t i = 0; i < n.branches.size(); ++i) {
      out += indent + (i == 0 ? "if " : "elseif ") + name + " = " +
             render_value(n.branches[i].first) + " then";
      explain_tree_child(*n.branches[i].second, depth, out);
    }
    out += indent + "else ";
    out += class_name(n.absent_class);
    out += '\n';
  }
}

std::string explain_tree(const TreeNode& t) {
  if (t.kind == TreeNode::Kind::Leaf)
    return "class: " + std::string(class_name(t.leaf_class)) + "\n";
  std::string out;
  explain_tree_node(t, 0, out);
  return out;
}

std::string explain_rules(const RuleList& rl) {
  std::string out;
  for (const Rule& r : rl.rules) {
    out += "if ";
    for (std::size_t i = 0; i < r.conditions.size(); ++i) {
      const Condition& c = r.conditions[i];
      if (i) out += " and ";
      std::string op = c.op == CondOp::Eq ? "=" : (c.op == CondOp::Le ? "<=" : ">=");
      out += "(" + std::string(long_name(c.feature)) + " " + op + " " +
             render_value(c.value) + ")";
    }
    out += " then ";
    out += class_name(r.cls);
    out += '\n';
  }
  out += "default is ";
  out += class_name(rl.default_class);
  out += '\n';
  return out;
}

// --- subcommand bodies ---

struct GenArgs {
  std::size_t n = 0;
  std::string labeler;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

void do_gen(const GenArgs& a) {
  GenSpec spec;
  spec.n = a.n;
  spec.labeler = labeler_from_spec(a.labeler);
  spec.noise = a.noise;
  spec.seed = a.seed;
  Corpus c = generate(spec);
  c.provenance = "gen: n=" + std::to_string(a.n) + " labeler=" + a.labeler +
                 " noise=" + shortest(a.noise) + " seed=" + std::to_string(a.seed);
  save_corpus(c, a.out);
}

struct PrepareArgs {
  std::string in;
  std::string out;
  bool combine_judges = false;
  bool drop_conjuncts = false;
};

void do_prepare(const PrepareArgs& a) {
  Corpus c = load_corpus(a.in);
  if (a.combine_judges) c = combine_and_filter_classifiable(c);
  if (a.drop_conjuncts) c = filter_non_conjuncts(c);
  save_corpus(c, a.out);
}

void do_baseline(const std::string& model, const std::string& in) {
  const Corpus c = load_corpus(in);
  const BaselineReport r = run_baseline(baseline_by_name(model), c);
  std::cout << "model: " << model << "\n"
            << "n: " << r.n << "\n"
            << "misclassified_discourse: " << r.misclassified_discourse << "\n"
            << "misclassified_sentential: " << r.misclassified_sentential << "\n"
            << "error_rate: " << shortest(r.error) << "\n";
  static const char* kLineOrder[] = {"1", "4", "5", "6", "7", "8",
                                     "9", "10", "majority", "fallback"};
  std::cout << "fired: {";
  bool first = true;
  for (const char* line : kLineOrder) {
    auto it = r.fired.find(line);
    if (it == r.fired.end()) continue;
    if (!first) std::cout << ", ";
    std::cout << line << ":" << it->second;
    first = false;
  }
  std::cout << "}\n";
}

struct TrainArgs {
  std::string learner;
  std::string set;
  std::string in;
  std::string out;
  bool no_prune = false;
  std::uint64_t seed = 0;
};

void do_train(const TrainArgs& a) {
  const Corpus c = load_corpus(a.in);
  const FeatureSet& s = catalog_set(a.set);
  if (a.learner == "tree") {
    TreeParams p;
    p.prune = !a.no_prune;
    TreePtr t = induce_tree(c, s, p);
    write_text(a.out, render_tree(*t));
    return;
  }
  if (a.learner == "rules") {
    RuleParams p;
    p.seed = a.seed;
    p.prune = !a.no_prune;
    const RuleList rl = learn_rules(c, s, p);
    write_text(a.out, render_rules(rl));
    return;
  }
  throw Error(Errc::InvalidSpec, "learner must be tree or rules");
}

void do_eval(const std::string& model_path, const std::string& in) {
  const Model m = model_from_file(model_path);
  const Corpus c = load_corpus(in);
  print_eval(error_rate(m, c));
}

struct CrossvalArgs {
  std::string learner;
  std::string sets;
  std::string in;
  std::uint64_t seed = 0;
  std::string out = "crossval_report.jsonl";
};

Fit tree_fit() {
  return [](const Corpus& train, const FeatureSet& s, std::uint64_t) {
    std::shared_ptr<TreeNode> t = induce_tree(train, s, TreeParams{});
    return Model([t](const Example& e) { return classify_tree(*t, e); });
  };
}

Fit rules_fit() {
  return [](const Corpus& train, const FeatureSet& s, std::uint64_t seed) {
    RuleParams p;
    p.seed = seed;
    auto rl = std::make_shared<RuleList>(learn_rules(train, s, p));
    return Model([rl](const Example& e) { return classify_rules(*rl, e); });
  };
}

void do_crossval(const CrossvalArgs& a) {
  const Corpus c = load_corpus(a.in);

  std::vector<const FeatureSet*> sets;
  if (a.sets == "all") {
    for (const FeatureSet& s : catalog()) sets.push_back(&s);
  } else {
    std::size_t pos = 0;
    while (pos <= a.sets.size()) {
      std::size_t comma = a.sets.find(',', pos);
      const std::string name = a.sets.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      sets.push_back(&catalog_set(name));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }

  std::vector<std::pair<std::string, Fit>> learners;
  if (a.learner == "tree" || a.learner == "both") learners.emplace_back("tree", tree_fit());
  if (a.learner == "rules" || a.learner == "both")
    learners.emplace_back("rules", rules_fit());
  if (learners.empty())
    throw Error(Errc::InvalidSpec, "learner must be tree, rules, or both");

  struct Task {
    const FeatureSet* set;
    const std::string* learner_name;
    const Fit* fit;
  };
  std::vector<Task> tasks;
  for (const FeatureSet* s : sets)
    for (const auto& [name, fit] : learners) tasks.push_back({s, &name, &fit});

  CvReport report;
  report.rows.resize(tasks.size());
  const unsigned workers = worker_count(tasks.size());
  std::vector<std::exception_ptr> failures(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < tasks.size(); i += workers)
          report.rows[i] = cross_validate(c, *tasks[i].fit, *tasks[i].set,
                                          *tasks[i].learner_name, 10, 0.9, a.seed);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& f : failures)
    if (f) std::rethrow_exception(f);

  std::cout << render_report(report);
  write_text(a.out, report_records(report));
}

void do_explain(const std::string& model_path) {
  const std::string text = read_text(model_path);
  if (looks_like_rules(text)) {
    std::cout << explain_rules(parse_rules(text));
  } else {
    const TreePtr t = parse_tree(text);
    std::cout << explain_tree(*t);
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"cue phrase corpus and classifier toolkit"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic labeled corpus");
  gen->add_option("--n", gen_args.n, "number of examples")->required();
  gen->add_option("--labeler", gen_args.labeler,
                  "prosodic | textual | majority | rules:<path>")
      ->required();
  gen->add_option("--noise", gen_args.noise, "label flip probability");
  gen->add_option("--seed", gen_args.seed, "random seed");
  gen->add_option("--out", gen_args.out, "output corpus path")->required();

  PrepareArgs prep_args;
  CLI::App* prepare = app.add_subcommand("prepare", "filter a corpus");
  prepare->add_option("--in", prep_args.in, "input corpus path")->required();
  prepare->add_flag("--combine-judges", prep_args.combine_judges,
                    "collapse judgements, keep classifiable examples");
  prepare->add_flag("--drop-conjuncts", prep_args.drop_conjuncts,
                    "drop and/or/but examples");
  prepare->add_option("--out", prep_args.out, "output corpus path")->required();

  std::string baseline_model, baseline_in;
  CLI::App* baseline = app.add_subcommand("baseline", "score a hand-built model");
  baseline->add_option("--model", baseline_model, "prosodic | textual | majority")
      ->required();
  baseline->add_option("--in", baseline_in, "labeled corpus path")->required();

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "induce a model");
  train->add_option("--learner", train_args.learner, "tree | rules")->required();
  train->add_option("--set", train_args.set, "feature set name")->required();
  train->add_option("--in", train_args.in, "labeled corpus path")->required();
  train->add_option("--out", train_args.out, "model output path")->required();
  train->add_flag("--no-prune", train_args.no_prune, "skip pruning");
  train->add_option("--seed", train_args.seed, "random seed");

  std::string eval_model, eval_in;
  CLI::App* eval = app.add_subcommand("eval", "score a model file");
  eval->add_option("--model", eval_model, "model file path")->required();
  eval->add_option("--in", eval_in, "labeled corpus path")->required();

  CrossvalArgs cv_args;
  CLI::App* crossval =
      app.add_subcommand("crossval", "cross-validate learners over feature sets");
  crossval->add_option("--learner", cv_args.learner, "tree | rules | both")->required();
  crossval->add_option("--sets", cv_args.sets, "all or comma-separated set names")
      ->required();
  crossval->add_option("--in", cv_args.in, "labeled corpus path")->required();
  crossval->add_option("--seed", cv_args.seed, "random seed");
  crossval->add_option("--out", cv_args.out, "machine-readable report path");

  std::string explain_model;
  CLI::App* explain = app.add_subcommand("explain", "print a model in long form");
  explain->add_option("--model", explain_model, "model file path")->required();

  try {
    app.parse(argc, argv);
    if (gen->parsed()) do_gen(gen_args);
    if (prepare->parsed()) do_prepare(prep_args);
    if (baseline->parsed()) do_baseline(baseline_model, baseline_in);
    if (train->parsed()) do_train(train_args);
    if (eval->parsed()) do_eval(eval_model, eval_in);
    if (crossval->parsed()) do_crossval(cv_args);
    if (explain->parsed()) do_explain(explain_model);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << "cue: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "cue: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cuelearn::cli
