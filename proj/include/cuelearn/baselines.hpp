#pragma once

#include <map>
#include <string>

#include "cuelearn/corpus.hpp"
#include "cuelearn/schema.hpp"

namespace cuelearn {

// A baseline's answer plus the identity of the decision line that produced
// it, for line-level accounting. Line tags for the prosodic model are
// "1", "4", "5", "6", "7", "8" and "fallback"; for the textual model "9",
// "10" and "fallback"; the majority model always reports "majority".
struct BaselineDecision {
  Classification cls;
  std::string line;
};

// Prosodic model over I-C, I-P and A:
//   line 1:  intermediate phrase is the cue alone or cue-initial -> discourse
//   line 4:  phrase-initial and deaccented                       -> discourse
//   line 5:  phrase-initial with L*                              -> discourse
//   line 6:  phrase-initial with H*                              -> sentential
//   line 7:  phrase-initial with a complex accent                -> sentential
//   line 8:  not phrase-initial                                  -> sentential
//   fallback: phrase-initial with ambiguous accent               -> sentential
BaselineDecision prosodic_decision(const Example& e);

// Textual model over O-P*:
//   line 9:  preceded by orthography     -> discourse
//   line 10: not preceded by orthography -> sentential
//   fallback: O-P* unknown (NA)          -> discourse
BaselineDecision textual_decision(const Example& e);

// Majority class of the hand corpora.
BaselineDecision majority_decision(const Example& e);

Classification prosodic_model(const Example& e);
Classification textual_model(const Example& e);
Classification majority_model(const Example& e);

struct BaselineReport {
  std::size_t n = 0;
  std::size_t misclassified_discourse = 0;   // gold discourse, called sentential
  std::size_t misclassified_sentential = 0;  // gold sentential, called discourse
  double error = 0.0;
  std::map<std::string, std::size_t> fired;  // decision line -> count
};

// Runs one baseline over a labeled corpus and tallies errors and line
// firings. Throws EmptyCorpus / MissingLabel.
BaselineReport run_baseline(BaselineDecision (*model)(const Example&), const Corpus& c);

}  // namespace cuelearn
