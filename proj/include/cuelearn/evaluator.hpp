#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cuelearn/corpus.hpp"
#include "cuelearn/schema.hpp"

namespace cuelearn {

using Model = std::function<Classification(const Example&)>;

// A model builder: training corpus (already projected to s), the feature
// set, and a seed for any internal randomness.
using Fit = std::function<Model(const Corpus& train, const FeatureSet& s,
                                std::uint64_t seed)>;

struct EvalResult {
  std::size_t n = 0;
  std::size_t misclassified_discourse = 0;   // gold discourse, called sentential
  std::size_t misclassified_sentential = 0;  // gold sentential, called discourse
  double error = 0.0;
};

// Error rate of m on a labeled corpus. The model sees copies with the label
// and judgements cleared. Throws EmptyCorpus / MissingLabel.
EvalResult error_rate(const Model& m, const Corpus& c);

struct CvRow {
  std::string set_name;
  std::string learner_name;
  std::vector<double> per_run_errors;  // fractions, one per run
  double mean_error_percent = 0.0;     // unrounded
  double stderr_percent = 0.0;         // sample stddev / sqrt(runs), unrounded
};

// Repeated random-split cross-validation. Each run r shuffles the corpus
// with the stream derived from (seed, 2r), trains on the first
// ceil(train_fraction * n) examples projected to s, fits with the seed
// derived from (seed, 2r+1), and scores the rest; runs are mutually
// independent, so any execution order gives identical numbers. Throws
// InvalidSpec / TooFewExamples / EmptyCorpus.
CvRow cross_validate(const Corpus& c, const Fit& fit, const FeatureSet& s,
                     const std::string& learner_name, std::size_t runs = 10,
                     double train_fraction = 0.9, std::uint64_t seed = 0);

struct CvReport {
  std::vector<CvRow> rows;
};

// Fixed-width human table, rows in catalog order then learner name; means
// are rounded to whole percents, standard errors to one decimal.
std::string render_report(const CvReport& report);

// Machine form: one JSON object per row, same order, fields set, learner,
// mean_error, stderr (percents) and runs (per-run error fractions), floats
// in shortest round-trip form.
std::string report_records(const CvReport& report);

}  // namespace cuelearn
