#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cuelearn {

// Every failure the library reports deliberately. Anything else escaping a
// cuelearn call is a plain std:: exception and indicates a caller bug.
enum class Errc {
  UnknownTag,          // symbolic value not in the feature's vocabulary
  NumericExpected,     // non-integer text for a numeric feature
  NonPositive,         // numeric feature value < 1
  NaNotAllowed,        // NA supplied for a feature that cannot be NA
  AbstractionMismatch, // abstract field inconsistent with its source field
  MissingFeature,      // example lacks a value the operation needs
  MissingLabel,        // example lacks the class label the operation needs
  MissingJudges,       // judge combination asked of a corpus without judges
  EmptyFeatureSet,     // learner invoked with no features
  EmptyCorpus,         // operation needs at least one example
  EmptyDistribution,   // entropy over zero examples
  ZeroCoverageBefore,  // FOIL gain with an empty pre-refinement cover
  NoTargetExamples,    // rule growth with no positives in the grow set
  PartitionMismatch,   // info-gain child counts do not sum to the parent
  TooFewExamples,      // cross-validation split would leave an empty side
  InvalidSpec,         // malformed synthetic-corpus spec or parameters
  Parse,               // malformed CSV, model file, or tone symbol
  Io,                  // file could not be opened or written
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  // line and column are 1-based; 0 means not set.
  Error(Errc code, std::string detail, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(compose(code, detail, line, column)),
        code_(code),
        detail_(std::move(detail)),
        line_(line),
        column_(column) {}

  Errc code() const { return code_; }
  const std::string& detail() const { return detail_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string compose(Errc code, const std::string& detail,
                             std::size_t line, std::size_t column) {
    std::string s = errc_name(code);
    s += ": ";
    s += detail;
    if (line) {
      s += " (line " + std::to_string(line);
      if (column) s += ", column " + std::to_string(column);
      s += ")";
    }
    return s;
  }

  Errc code_;
  std::string detail_;
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

}  // namespace cuelearn
