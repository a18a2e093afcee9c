#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cuelearn/corpus.hpp"
#include "cuelearn/schema.hpp"

namespace cuelearn {

enum class CondOp : std::uint8_t { Eq, Le, Ge };

// A single test. Eq applies to symbolic features (NA is an ordinary value);
// Le and Ge apply to numeric features.
struct Condition {
  FeatureId feature{};
  CondOp op = CondOp::Eq;
  FeatureValue value;

  bool holds(const Example& e) const;
};

// A conjunction of conditions concluding a class. An empty conjunction is
// legal only as the implicit body of the default.
struct Rule {
  std::vector<Condition> conditions;
  Classification cls = Classification::Discourse;

  bool covers(const Example& e) const;
};

// First-match-wins ordered list with a default. Learned lists have every
// rule predicting the target class and the opposite class as default.
struct RuleList {
  std::vector<Rule> rules;
  Classification default_class = Classification::Sentential;
};

struct RuleParams {
  double grow_fraction = 2.0 / 3.0;  // share of the data used for growing
  std::size_t min_coverage = 1;      // target examples a rule must cover in its grow set
  std::uint64_t seed = 0;
  bool prune = true;
};

// FOIL gain of refining a rule whose cover holds (p_before, n_before)
// target/other examples into one holding (p_after, n_after):
//   p_after * (log2(p_after/(p_after+n_after)) - log2(p_before/(p_before+n_before)))
// Zero when p_after is zero. Throws ZeroCoverageBefore when the
// pre-refinement cover is empty.
double foil_gain(std::size_t p_before, std::size_t n_before, std::size_t p_after,
                 std::size_t n_after);

// Greedily conjoins the best-gain condition (symbolic equality over the
// vocabulary, numeric <= / >= over observed values; at most one bound of
// each direction per feature) until no non-target example is covered or no
// condition has positive gain. Ties favor the earlier feature in schema
// order, then = before <= before >=, then the smaller threshold. Throws
// NoTargetExamples when the grow set holds no target example.
Rule grow_rule(const Corpus& grow_set, Classification target, const FeatureSet& s,
               const RuleParams& p);

// Evaluates every conditions-prefix of r on the prune set by
// v = (p - n)/(p + n), with p counting examples of r's class, and keeps the
// best prefix, ties to the shorter one; prefixes covering nothing score -1.
// An empty prune set returns r unchanged.
Rule prune_rule(const Rule& r, const Corpus& prune_set);

// Separate-and-conquer induction of an ordered rule list for the minority
// class (ties favor discourse). Each round reshuffles the remaining
// examples with a stream derived from (seed, rule index), grows on the
// first ceil(grow_fraction * remaining) of them, prunes on the rest, and
// accepts the rule only if its precision on the prune set (grow set when
// empty) beats the remaining target fraction and it covers at least
// min_coverage target examples of its grow set; covered examples are then
// removed. Throws EmptyCorpus / EmptyFeatureSet / MissingLabel.
RuleList learn_rules(const Corpus& c, const FeatureSet& s, const RuleParams& p);

Classification classify_rules(const RuleList& rl, const Example& e);
// Same, also reporting which rule fired (nullopt = default).
std::pair<Classification, std::optional<std::size_t>> classify_rules_fired(
    const RuleList& rl, const Example& e);

// Text form: one "if <cond> [and <cond>]* then <class>" line per rule, a
// final "default is <class>" line. Conditions spell the CSV header name,
// one of = <= >=, and the canonical value.
std::string render_rules(const RuleList& rl);

// Inverse of render_rules. Enforces the grammar, the op/feature-kind
// pairing, single-class rule bodies, and an opposite-class default; throws
// Parse with a 1-based line number.
RuleList parse_rules(const std::string& text);

}  // namespace cuelearn
