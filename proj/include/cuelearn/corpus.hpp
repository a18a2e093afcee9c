#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cuelearn/schema.hpp"

namespace cuelearn {

// A corpus is an ordered list of examples plus a free-text provenance note.
// All examples carry the same labeling variant: a final class, or two judge
// annotations, or neither.
struct Corpus {
  std::vector<Example> examples;
  std::string provenance;

  std::size_t size() const { return examples.size(); }
};

// CSV wire format. Columns are the fifteen feature headers in schema order
// followed by either `class` or `judge1,judge2`. Values are the canonical
// spellings, unquoted, LF line endings. Provenance rides in leading
// `# `-prefixed comment lines. load() validates every value and the
// consistency of the abstract columns; errors carry 1-based line and column.
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& c, const std::filesystem::path& path);

// Same parser/renderer on in-memory text, used by the file functions.
Corpus parse_corpus(const std::string& text);
std::string render_corpus(const Corpus& c);

// Collapses judge pairs into final labels and keeps only the classifiable
// examples (both judges agree on a non-ambiguous judgement). Requires the
// judge variant.
Corpus combine_and_filter_classifiable(const Corpus& c);

// Drops examples whose lexeme is a coordinating conjunction (and, or, but).
Corpus filter_non_conjuncts(const Corpus& c);

// --- Synthetic corpora ---

struct NumericRange {
  int lo = 1;
  int hi = 12;
};

// Per-feature sampling distributions. Weights are listed in vocabulary
// order; an "NA" entry is legal only where the feature admits NA. The
// positional features P-P and I-P are drawn uniformly from 1..length, and
// the abstract features are derived, so neither is specified here.
struct Marginals {
  NumericRange phrase_len;
  NumericRange inter_len;
  std::map<FeatureId, std::vector<std::pair<std::string, double>>> symbolic;

  // Uniform over each vocabulary, with NA weight 0.05 where NA is legal.
  static Marginals defaults();
};

struct GenSpec {
  std::size_t n = 0;
  std::function<Classification(const Example&)> labeler;
  double noise = 0.0;  // per-example label flip probability
  Marginals marginals = Marginals::defaults();
  std::uint64_t seed = 0;
};

// Draws n examples feature by feature in schema order, labels each with the
// labeler, then flips the label with probability noise. The flip variate is
// drawn for every example, so corpora generated from one seed share their
// feature vectors across noise settings. Throws InvalidSpec on bad
// parameters.
Corpus generate(const GenSpec& spec);

// --- Intonational well-formedness ---

// The tone inventory: six pitch accents, two phrase accents, two boundary
// tones, in standard autosegmental notation.
enum class Tone : std::uint8_t {
  HStar,      // H*
  LStar,      // L*
  LStarH,     // L*+H
  LHStar,     // L+H*
  HStarL,     // H*+L
  HLStar,     // H+L*
  HPhrase,    // H-
  LPhrase,    // L-
  HBoundary,  // H%
  LBoundary,  // L%
};

inline constexpr std::size_t kToneCount = 10;

std::string_view tone_name(Tone t);
Tone tone_from_name(std::string_view name);  // throws UnknownTag

bool is_pitch_accent(Tone t);
bool is_phrase_accent(Tone t);
bool is_boundary_tone(Tone t);

struct ToneCheck {
  bool accepted = false;
  // 0-based index of the offending symbol when rejected; sequence size when
  // the sequence ends too early (or when accepted).
  std::size_t position = 0;
};

// Checks membership in the tune language: one or more intermediate phrases,
// each one or more pitch accents followed by a phrase accent, closed by a
// single boundary tone.
ToneCheck validate_tones(const std::vector<Tone>& tones);

}  // namespace cuelearn
