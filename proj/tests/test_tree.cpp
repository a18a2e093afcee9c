#include <doctest.h>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "cuelearn/baselines.hpp"
#include "cuelearn/corpus.hpp"
#include "cuelearn/error.hpp"
#include "cuelearn/tree.hpp"
#include "oracle.hpp"

using namespace cuelearn;

namespace {

Example ex(std::initializer_list<std::pair<FeatureId, FeatureValue>> values,
           Classification label) {
  Example e;
  for (const auto& [f, v] : values) e.set(f, v);
  e.label = label;
  return e;
}

FeatureValue num(int v) { return FeatureValue::numeric(v); }
FeatureValue sym(const char* t) { return FeatureValue::symbolic(t); }

TreePtr leaf(std::size_t n_discourse, std::size_t n_sentential) {
  auto n = std::make_unique<TreeNode>();
  n->kind = TreeNode::Kind::Leaf;
  n->n_discourse = n_discourse;
  n->n_sentential = n_sentential;
  n->leaf_class = n_sentential > n_discourse ? Classification::Sentential
                                             : Classification::Discourse;
  return n;
}

Errc parse_code(const std::string& text, std::size_t* line = nullptr) {
  try {
    parse_tree(text);
  } catch (const Error& e) {
    if (line) *line = e.line();
    return e.code();
  }
  return Errc::Io;  // not reached in these tests
}

}  // namespace

TEST_CASE("entropy") {
  CHECK(entropy(9, 5) == doctest::Approx(0.940285958670631).epsilon(1e-12));
  CHECK(std::fabs(entropy(9, 5) - 0.94029) <= 1e-5);
  CHECK(entropy(7, 7) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(entropy(5, 0) == 0.0);
  CHECK(entropy(0, 5) == 0.0);
  CHECK(entropy(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  try {
    entropy(0, 0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyDistribution);
  }
  for (std::size_t d = 0; d <= 12; ++d)
    for (std::size_t s = d == 0 ? 1 : 0; s <= 12; ++s)
      CHECK(entropy(d, s) ==
            doctest::Approx(static_cast<double>(oracle::entropy(
                                static_cast<long double>(d), static_cast<long double>(s))))
                .epsilon(1e-9));
}

TEST_CASE("information gain") {
  const double g = info_gain(9, 5, {{6, 2}, {3, 3}});
  CHECK(g == doctest::Approx(0.0481270304082694).epsilon(1e-12));
  CHECK(std::fabs(g - 0.04813) <= 1e-4);

  // A degenerate split gains nothing; empty children contribute nothing.
  CHECK(info_gain(9, 5, {{9, 5}, {0, 0}}) == doctest::Approx(0.0).epsilon(1e-12));
  // A perfect split recovers the full parent entropy.
  CHECK(info_gain(7, 7, {{7, 0}, {0, 7}}) == doctest::Approx(1.0).epsilon(1e-12));
  // Three-way splits are legal (symbolic tests).
  const double g3 = info_gain(6, 6, {{4, 0}, {2, 2}, {0, 4}});
  CHECK(g3 == doctest::Approx(static_cast<double>(oracle::info_gain(
                                  6.0L, 6.0L, {{4.0L, 0.0L}, {2.0L, 2.0L}, {0.0L, 4.0L}})))
                  .epsilon(1e-12));

  try {
    info_gain(9, 5, {{6, 2}, {3, 2}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PartitionMismatch);
  }
}

TEST_CASE("pessimistic error bound") {
  CHECK(pessimistic_upper(0, 1, 0.25) == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(pessimistic_upper(0, 10, 0.25) ==
        doctest::Approx(0.129449436703876).epsilon(1e-9));
  CHECK(pessimistic_upper(1, 10, 0.25) ==
        doctest::Approx(0.247370629458753).epsilon(1e-9));
  CHECK(pessimistic_upper(2, 10, 0.25) ==
        doctest::Approx(0.355444208253059).epsilon(1e-9));
  CHECK(pessimistic_upper(3, 20, 0.25) ==
        doctest::Approx(0.242105536078007).epsilon(1e-9));
  CHECK(pessimistic_upper(10, 10, 0.25) == 1.0);
  CHECK(pessimistic_upper(5, 3, 0.25) == 1.0);

  // Monotone in the error count, and always above the observed rate.
  double prev = 0.0;
  for (std::size_t e = 0; e <= 12; ++e) {
    const double u = pessimistic_upper(e, 12, 0.25);
    CHECK(u > static_cast<double>(e) / 12.0 - 1e-12);
    CHECK(u >= prev);
    prev = u;
  }

  for (std::size_t n : {1u, 2u, 7u, 20u, 40u})
    for (std::size_t e = 0; e < n; ++e)
      CHECK(pessimistic_upper(e, n, 0.25) ==
            doctest::Approx(static_cast<double>(oracle::pessimistic_upper(e, n, 0.25L)))
                .epsilon(1e-9));

  CHECK_THROWS_AS(pessimistic_upper(0, 0, 0.25), Error);
  CHECK_THROWS_AS(pessimistic_upper(0, 5, 0.0), Error);
  CHECK_THROWS_AS(pessimistic_upper(0, 5, 1.0), Error);
}

TEST_CASE("numeric growth picks the best threshold") {
  Corpus c;
  c.examples = {
      ex({{FeatureId::PhrasePos, num(1)}}, Classification::Discourse),
      ex({{FeatureId::PhrasePos, num(2)}}, Classification::Discourse),
      ex({{FeatureId::PhrasePos, num(3)}}, Classification::Sentential),
      ex({{FeatureId::PhrasePos, num(4)}}, Classification::Sentential),
  };
  const FeatureSet s{"p_pos only", {FeatureId::PhrasePos}};
  TreeParams p;
  p.min_leaf = 1;
  p.prune = false;
  const TreePtr t = induce_tree(c, s, p);
  CHECK(render_tree(*t) ==
        "if p_pos <= 2 then discourse\n"
        "elseif p_pos > 2 then sentential\n");
  CHECK(training_errors(*t) == 0);
  CHECK(count_nodes(*t) == 3);
  CHECK(count_leaves(*t) == 2);
  CHECK(classify_tree(*t, c.examples[0]) == Classification::Discourse);
  CHECK(classify_tree(*t, c.examples[3]) == Classification::Sentential);
}

TEST_CASE("symbolic growth orders branches by vocabulary with NA last") {
  Corpus c;
  c.examples = {
      ex({{FeatureId::OrthPrec, sym("comma")}}, Classification::Discourse),
      ex({{FeatureId::OrthPrec, sym("false")}}, Classification::Sentential),
      ex({{FeatureId::OrthPrec, sym("false")}}, Classification::Sentential),
      ex({{FeatureId::OrthPrec, sym("false")}}, Classification::Sentential),
      ex({{FeatureId::OrthPrec, FeatureValue::na()}}, Classification::Discourse),
  };
  const FeatureSet s{"o_p only", {FeatureId::OrthPrec}};
  TreeParams p;
  p.min_leaf = 1;
  p.prune = false;
  const TreePtr t = induce_tree(c, s, p);
  CHECK(render_tree(*t) ==
        "if orth_prec = comma then discourse\n"
        "elseif orth_prec = false then sentential\n"
        "elseif orth_prec = NA then discourse\n"
        "else sentential\n");

  // Values unseen in training take the majority fallback.
  Example dash = ex({{FeatureId::OrthPrec, sym("dash")}}, Classification::Discourse);
  CHECK(classify_tree(*t, dash) == Classification::Sentential);
  Example na_probe = ex({{FeatureId::OrthPrec, FeatureValue::na()}},
                        Classification::Discourse);
  CHECK(classify_tree(*t, na_probe) == Classification::Discourse);
}

TEST_CASE("zero-gain splits are taken when purity requires them") {
  // Exclusive-or of two symbolic features: every single split has zero gain,
  // yet the grown tree must still reach purity.
  Corpus c;
  for (int copy = 0; copy < 2; ++copy)
    for (const char* accent : {"H*", "L*"})
      for (const char* cue : {"true", "false"}) {
        const bool equal = (std::string(accent) == "H*") == (std::string(cue) == "true");
        c.examples.push_back(ex({{FeatureId::Accent, sym(accent)},
                                 {FeatureId::CuePrec, sym(cue)}},
                                equal ? Classification::Discourse
                                      : Classification::Sentential));
      }
  const FeatureSet s{"xor pair", {FeatureId::Accent, FeatureId::CuePrec}};
  TreeParams p;
  p.min_leaf = 1;
  p.prune = false;
  const TreePtr t = induce_tree(c, s, p);
  CHECK(training_errors(*t) == 0);
  CHECK(count_leaves(*t) == 4);
  // Ties favor the earlier feature in schema order, so the root tests A.
  CHECK(t->kind == TreeNode::Kind::SymbolicTest);
  CHECK(t->feature == FeatureId::Accent);
  for (const Example& e : c.examples) CHECK(classify_tree(*t, e) == *e.label);

  // Pure leaves survive pruning here.
  TreeParams pruned = p;
  pruned.prune = true;
  const TreePtr t2 = induce_tree(c, s, pruned);
  CHECK(training_errors(*t2) == 0);
}

TEST_CASE("small nodes become leaves") {
  Corpus c;
  c.examples = {
      ex({{FeatureId::PhrasePos, num(1)}}, Classification::Discourse),
      ex({{FeatureId::PhrasePos, num(2)}}, Classification::Discourse),
      ex({{FeatureId::PhrasePos, num(3)}}, Classification::Sentential),
  };
  const FeatureSet s{"p_pos only", {FeatureId::PhrasePos}};
  TreeParams p;
  p.min_leaf = 2;  // 3 < 2*2, so the root stays a leaf
  p.prune = false;
  const TreePtr t = induce_tree(c, s, p);
  CHECK(t->kind == TreeNode::Kind::Leaf);
  CHECK(t->leaf_class == Classification::Discourse);
  CHECK(training_errors(*t) == 1);
  CHECK(render_tree(*t) == "class: discourse\n");
}

TEST_CASE("constant features leave nothing to split on") {
  Corpus c;
  c.examples = {
      ex({{FeatureId::PhrasePos, num(1)}}, Classification::Discourse),
      ex({{FeatureId::PhrasePos, num(1)}}, Classification::Sentential),
      ex({{FeatureId::PhrasePos, num(1)}}, Classification::Sentential),
  };
  const FeatureSet s{"p_pos only", {FeatureId::PhrasePos}};
  TreeParams p;
  p.min_leaf = 1;
  const TreePtr t = induce_tree(c, s, p);
  CHECK(t->kind == TreeNode::Kind::Leaf);
  CHECK(t->leaf_class == Classification::Sentential);
}

TEST_CASE("leaf class ties favor discourse") {
  Corpus c;
  c.examples = {
      ex({{FeatureId::PhrasePos, num(1)}}, Classification::Discourse),
      ex({{FeatureId::PhrasePos, num(1)}}, Classification::Sentential),
  };
  const FeatureSet s{"p_pos only", {FeatureId::PhrasePos}};
  TreeParams p;
  p.min_leaf = 1;
  const TreePtr t = induce_tree(c, s, p);
  CHECK(t->kind == TreeNode::Kind::Leaf);
  CHECK(t->leaf_class == Classification::Discourse);
}

TEST_CASE("pruning collapses a subtree the bound no longer supports") {
  auto root = std::make_unique<TreeNode>();
  root->kind = TreeNode::Kind::NumericTest;
  root->feature = FeatureId::PhrasePos;
  root->threshold = 1;
  root->n_discourse = 3;
  root->n_sentential = 17;
  root->le_child = leaf(2, 8);
  root->gt_child = leaf(1, 9);

  const double subtree = estimated_errors(*root, 0.25);
  CHECK(subtree == doctest::Approx(6.02814837711812).epsilon(1e-9));
  const double collapsed = 20.0 * pessimistic_upper(3, 20, 0.25);
  CHECK(collapsed == doctest::Approx(4.84211072156014).epsilon(1e-9));

  TreeParams p;
  const TreePtr pruned = prune(clone_tree(*root), p);
  CHECK(pruned->kind == TreeNode::Kind::Leaf);
  CHECK(pruned->leaf_class == Classification::Sentential);
  CHECK(count_nodes(*pruned) == 1);
  CHECK(estimated_errors(*pruned, 0.25) == doctest::Approx(collapsed).epsilon(1e-9));
}

TEST_CASE("pruning keeps a subtree that outperforms the collapsed leaf") {
  auto root = std::make_unique<TreeNode>();
  root->kind = TreeNode::Kind::NumericTest;
  root->feature = FeatureId::PhrasePos;
  root->threshold = 1;
  root->n_discourse = 10;
  root->n_sentential = 10;
  root->le_child = leaf(10, 0);
  root->gt_child = leaf(0, 10);

  TreeParams p;
  const TreePtr pruned = prune(clone_tree(*root), p);
  CHECK(pruned->kind == TreeNode::Kind::NumericTest);
  CHECK(count_nodes(*pruned) == 3);
  CHECK(estimated_errors(*pruned, 0.25) ==
        doctest::Approx(estimated_errors(*root, 0.25)).epsilon(1e-12));
}

TEST_CASE("pruning never hurts the estimate or grows the tree") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u, 6u, 7u, 8u}) {
    GenSpec spec;
    spec.n = 120;
    spec.labeler = prosodic_model;
    spec.noise = 0.2;
    spec.seed = seed;
    const Corpus c = generate(spec);
    const FeatureSet& s = catalog_set("hl93features");
    TreeParams p;
    p.min_leaf = 2;
    p.prune = false;
    const TreePtr grown = induce_tree(c, s, p);
    const TreePtr pruned = prune(clone_tree(*grown), p);
    CHECK(estimated_errors(*pruned, p.confidence) <=
          estimated_errors(*grown, p.confidence) + 1e-9);
    CHECK(count_nodes(*pruned) <= count_nodes(*grown));

    // Pruning is idempotent.
    const TreePtr again = prune(clone_tree(*pruned), p);
    CHECK(render_tree(*again) == render_tree(*pruned));
  }
}

TEST_CASE("noise-free training reaches zero training error") {
  GenSpec spec;
  spec.n = 150;
  spec.labeler = prosodic_model;
  spec.noise = 0.0;
  spec.seed = 17;
  const Corpus c = generate(spec);
  const FeatureSet& s = catalog_set("hl93features");
  TreeParams p;
  p.min_leaf = 1;
  p.prune = false;
  const TreePtr t = induce_tree(c, s, p);
  CHECK(training_errors(*t) == 0);
  for (const Example& e : c.examples) CHECK(classify_tree(*t, e) == *e.label);
}

TEST_CASE("growth is deterministic") {
  GenSpec spec;
  spec.n = 200;
  spec.labeler = textual_model;
  spec.noise = 0.1;
  spec.seed = 23;
  const Corpus c = generate(spec);
  const FeatureSet& s = catalog_set("speech-text");
  TreeParams p;
  const TreePtr a = induce_tree(c, s, p);
  const TreePtr b = induce_tree(c, s, p);
  CHECK(render_tree(*a) == render_tree(*b));
}

TEST_CASE("tree text round-trips byte for byte") {
  GenSpec spec;
  spec.n = 180;
  spec.labeler = prosodic_model;
  spec.noise = 0.1;
  spec.seed = 31;
  const Corpus c = generate(spec);
  const FeatureSet& s = catalog_set("speech-text");
  TreeParams p;
  const TreePtr t = induce_tree(c, s, p);
  const std::string text = render_tree(*t);
  const TreePtr back = parse_tree(text);
  CHECK(render_tree(*back) == text);

  GenSpec probe_spec = spec;
  probe_spec.seed = 32;
  const Corpus probes = generate(probe_spec);
  for (const Example& e : probes.examples)
    CHECK(classify_tree(*t, e) == classify_tree(*back, e));
}

TEST_CASE("single-leaf text round-trips") {
  const TreePtr t = parse_tree("class: discourse\n");
  CHECK(t->kind == TreeNode::Kind::Leaf);
  CHECK(t->leaf_class == Classification::Discourse);
  CHECK(render_tree(*t) == "class: discourse\n");
}

TEST_CASE("clone preserves structure and counts") {
  auto root = std::make_unique<TreeNode>();
  root->kind = TreeNode::Kind::SymbolicTest;
  root->feature = FeatureId::Accent;
  root->n_discourse = 3;
  root->n_sentential = 4;
  root->absent_class = Classification::Sentential;
  root->branches.emplace_back(sym("H*"), leaf(0, 4));
  root->branches.emplace_back(sym("L*"), leaf(3, 0));
  const TreePtr copy = clone_tree(*root);
  CHECK(render_tree(*copy) == render_tree(*root));
  CHECK(copy->n_discourse == 3);
  CHECK(copy->branches.size() == 2);
  CHECK(copy->branches[1].second->n_discourse == 3);
  CHECK(estimated_errors(*copy, 0.25) ==
        doctest::Approx(estimated_errors(*root, 0.25)).epsilon(1e-12));
}

TEST_CASE("tree parse errors") {
  std::size_t line = 0;

  CHECK(parse_code("") == Errc::Parse);
  CHECK(parse_code("class: discoursish\n") == Errc::Parse);
  CHECK(parse_code("maybe p_pos <= 1 then discourse\n") == Errc::Parse);

  // Numeric tests need their matching > line.
  CHECK(parse_code("if p_pos <= 1 then discourse\n", &line) == Errc::Parse);
  CHECK(parse_code("if p_pos <= 1 then discourse\n"
                   "elseif p_pos > 2 then sentential\n",
                   &line) == Errc::Parse);
  CHECK(line == 2);
  CHECK(parse_code("if p_pos <= 1 then discourse\n"
                   "elseif p_len > 1 then sentential\n") == Errc::Parse);

  // Operator and feature kind must agree.
  CHECK(parse_code("if p_pos = 1 then discourse\nelse sentential\n") == Errc::Parse);
  CHECK(parse_code("if accent <= 1 then discourse\n"
                   "elseif accent > 1 then sentential\n") == Errc::Parse);
  CHECK(parse_code("if p_pos >= 1 then discourse\n") == Errc::Parse);

  // Unknown names.
  CHECK(parse_code("if frobnitz <= 1 then discourse\n"
                   "elseif frobnitz > 1 then sentential\n") == Errc::Parse);
  CHECK(parse_code("if accent = M* then discourse\nelse sentential\n") == Errc::Parse);

  // Symbolic chains need the closing else and distinct branch values.
  CHECK(parse_code("if accent = H* then discourse\n") == Errc::Parse);
  CHECK(parse_code("if accent = H* then discourse\n"
                   "elseif accent = H* then sentential\n"
                   "else sentential\n",
                   &line) == Errc::Parse);
  CHECK(line == 2);
  CHECK(parse_code("if accent = H* then discourse\n"
                   "elseif token = now then sentential\n"
                   "else sentential\n") == Errc::Parse);

  // Structure around the tests.
  CHECK(parse_code("if p_pos <= 1 then discourse\n"
                   "elseif p_pos > 1 then sentential\n"
                   "class: discourse\n",
                   &line) == Errc::Parse);
  CHECK(line == 3);
  CHECK(parse_code(" if p_pos <= 1 then discourse\n"
                   " elseif p_pos > 1 then sentential\n") == Errc::Parse);
  CHECK(parse_code("if p_pos <= 1 then\n"
                   "elseif p_pos > 1 then sentential\n") == Errc::Parse);

  // A nested child must sit exactly one level deeper.
  CHECK(parse_code("if p_pos <= 1 then\n"
                   "    class: discourse\n"
                   "elseif p_pos > 1 then sentential\n") == Errc::Parse);
}

TEST_CASE("nested tree text parses") {
  const std::string text =
      "if p_pos <= 1 then\n"
      "  if accent = L* then discourse\n"
      "  elseif accent = H* then sentential\n"
      "  else discourse\n"
      "elseif p_pos > 1 then sentential\n";
  const TreePtr t = parse_tree(text);
  CHECK(render_tree(*t) == text);
  Example e = ex({{FeatureId::PhrasePos, num(1)}, {FeatureId::Accent, sym("L*")}},
                 Classification::Discourse);
  CHECK(classify_tree(*t, e) == Classification::Discourse);
  e.set(FeatureId::Accent, sym("H*"));
  CHECK(classify_tree(*t, e) == Classification::Sentential);
  e.set(FeatureId::Accent, sym("H*+L"));
  CHECK(classify_tree(*t, e) == Classification::Discourse);
  e.set(FeatureId::PhrasePos, num(5));
  CHECK(classify_tree(*t, e) == Classification::Sentential);
}

TEST_CASE("tree induction input errors") {
  const FeatureSet s{"p_pos only", {FeatureId::PhrasePos}};
  TreeParams p;

  Corpus empty;
  CHECK_THROWS_AS(induce_tree(empty, s, p), Error);

  Corpus c;
  c.examples = {ex({{FeatureId::PhrasePos, num(1)}}, Classification::Discourse)};
  const FeatureSet none{"empty", {}};
  try {
    induce_tree(c, none, p);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyFeatureSet);
  }

  Corpus unlabeled;
  unlabeled.examples = {ex({{FeatureId::PhrasePos, num(1)}}, Classification::Discourse)};
  unlabeled.examples[0].label.reset();
  try {
    induce_tree(unlabeled, s, p);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingLabel);
  }

  // A member feature consulted during splitting must be present; a node
  // needs 2*min_leaf examples and mixed classes before candidates are tried.
  Corpus sparse;
  sparse.examples = {
      ex({{FeatureId::PhrasePos, num(1)}}, Classification::Discourse),
      ex({{FeatureId::PhrasePos, num(2)}}, Classification::Sentential),
      ex({{FeatureId::PhrasePos, num(1)}}, Classification::Discourse),
      ex({{FeatureId::PhrasePos, num(2)}}, Classification::Sentential),
  };
  const FeatureSet wide{"two", {FeatureId::PhrasePos, FeatureId::Token}};
  try {
    induce_tree(sparse, wide, p);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingFeature);
  }
}

TEST_CASE("classification needs the tested feature") {
  const TreePtr t = parse_tree(
      "if p_pos <= 1 then discourse\nelseif p_pos > 1 then sentential\n");
  Example e;
  e.set(FeatureId::Token, sym("now"));
  CHECK_THROWS_AS(classify_tree(*t, e), Error);
}
