#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cuelearn/corpus.hpp"
#include "cuelearn/schema.hpp"

namespace cuelearn {

struct TreeParams {
  std::size_t min_leaf = 2;   // nodes with < 2*min_leaf examples become leaves
  bool prune = true;
  double confidence = 0.25;   // pessimistic-error confidence level
};

// One node of an induced decision tree. Every node keeps the class counts of
// the training examples routed through it; pruning needs them, and a leaf's
// class is their majority (ties favor discourse).
struct TreeNode {
  enum class Kind : std::uint8_t { Leaf, NumericTest, SymbolicTest };

  Kind kind = Kind::Leaf;
  std::size_t n_discourse = 0;
  std::size_t n_sentential = 0;
  Classification leaf_class = Classification::Discourse;

  // NumericTest: e[feature] <= threshold goes left, > goes right.
  FeatureId feature{};
  int threshold = 0;
  std::unique_ptr<TreeNode> le_child;
  std::unique_ptr<TreeNode> gt_child;

  // SymbolicTest: one branch per value observed at this node, in vocabulary
  // order with NA last. Values unseen in training fall back to absent_class.
  std::vector<std::pair<FeatureValue, std::unique_ptr<TreeNode>>> branches;
  Classification absent_class = Classification::Discourse;
};

using TreePtr = std::unique_ptr<TreeNode>;

// Binary entropy of a (discourse, sentential) count pair, in bits.
// Throws EmptyDistribution when both counts are zero.
double entropy(std::size_t n_discourse, std::size_t n_sentential);

// Information gain of splitting (d, s) into the given child count pairs.
// Child counts must sum to the parent (PartitionMismatch otherwise).
double info_gain(std::size_t n_discourse, std::size_t n_sentential,
                 const std::vector<std::pair<std::size_t, std::size_t>>& children);

// Upper confidence limit on the error probability after observing `errors`
// errors in n trials: the largest p whose binomial CDF at `errors` still
// reaches the confidence level. errors == n yields 1.
double pessimistic_upper(std::size_t errors, std::size_t n, double confidence);

// Grows a tree by recursive greedy splitting on information gain. Candidate
// tests are "f <= v" for numeric features (v each observed value except the
// largest) and one multiway branch per symbolic feature with >= 2 observed
// values. Growth stops at class purity, below 2*min_leaf examples, or when
// no candidate remains; ties favor the earlier feature in schema order, then
// the smaller threshold. Throws EmptyCorpus / EmptyFeatureSet /
// MissingLabel / MissingFeature.
TreePtr grow(const Corpus& c, const FeatureSet& s, const TreeParams& p);

// Pessimistic bottom-up pruning: a subtree collapses to a leaf when the
// upper-bound error estimate of the collapsed leaf does not exceed the sum
// over its leaves. Returns the (possibly) reduced tree; never increases the
// estimate or the node count.
TreePtr prune(TreePtr t, const TreeParams& p);

// Convenience: grow then prune per p.prune.
TreePtr induce_tree(const Corpus& c, const FeatureSet& s, const TreeParams& p);

Classification classify_tree(const TreeNode& t, const Example& e);

TreePtr clone_tree(const TreeNode& t);
std::size_t count_nodes(const TreeNode& t);
std::size_t count_leaves(const TreeNode& t);
// Sum over leaves of n * pessimistic_upper(wrong, n, confidence): the
// pruning objective.
double estimated_errors(const TreeNode& t, double confidence);
// Depth-first training error count (examples routed to a leaf of the other
// class), against the counts stored in the leaves.
std::size_t training_errors(const TreeNode& t);

// Canonical text form. Numeric tests render as an if/elseif pair, symbolic
// tests as an if/elseif chain over the branch values closed by an `else`
// line carrying the unseen-value class; leaves inline after `then`, or as
// `class: <name>` for a single-leaf tree. Two-space indentation per level.
std::string render_tree(const TreeNode& t);

// Inverse of render_tree up to the stored class counts (which the text form
// does not carry). Throws Parse with a 1-based line number.
TreePtr parse_tree(const std::string& text);

}  // namespace cuelearn
