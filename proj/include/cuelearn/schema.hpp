#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cuelearn/error.hpp"

namespace cuelearn {

// The fourteen observed features of a cue-phrase token plus the lexeme
// itself, in fixed schema order. This order is the tie-break order for
// learners and the column order of the CSV format, so it never changes.
enum class FeatureId : std::uint8_t {
  PhraseLen,      // P-L   length of the intonational phrase
  PhrasePos,      // P-P   position in the intonational phrase
  InterLen,       // I-L   length of the intermediate phrase
  InterPos,       // I-P   position in the intermediate phrase
  InterComp,      // I-C   composition of the intermediate phrase
  Accent,         // A     pitch accent
  AccentStar,     // A*    pitch accent, abstracted
  CuePrec,        // C-P   preceded by a cue phrase
  CueSucc,        // C-S   succeeded by a cue phrase
  OrthPrec,       // O-P   preceding orthography
  OrthPrecStar,   // O-P*  preceding orthography, abstracted
  OrthSucc,       // O-S   succeeding orthography
  OrthSuccStar,   // O-S*  succeeding orthography, abstracted
  Pos,            // POS   part of speech
  Token,          // T     the lexeme
};

inline constexpr std::size_t kFeatureCount = 15;

constexpr std::size_t index_of(FeatureId f) { return static_cast<std::size_t>(f); }
FeatureId feature_at(std::size_t index);

// Names: short_name is the display name ("P-P"), header_name the CSV column
// and model-file name ("p_pos"), long_name the descriptive phrase used by
// `explain` ("position in intonational phrase").
std::string_view short_name(FeatureId f);
std::string_view header_name(FeatureId f);
std::string_view long_name(FeatureId f);
FeatureId feature_from_short(std::string_view name);    // throws UnknownTag
FeatureId feature_from_header(std::string_view name);   // throws UnknownTag

bool is_numeric(FeatureId f);
bool na_allowed(FeatureId f);
// Vocabulary of a symbolic feature, in canonical order (without NA).
// Numeric features have an empty vocabulary.
const std::vector<std::string>& vocabulary(FeatureId f);

enum class Classification : std::uint8_t { Discourse, Sentential };

Classification opposite(Classification c);
std::string_view class_name(Classification c);               // "discourse"/"sentential"
Classification class_from_name(std::string_view name);       // throws UnknownTag

// A judge's annotation admits a third value the final label does not.
enum class Judgement : std::uint8_t { Discourse, Sentential, Ambiguous };

std::string_view judgement_name(Judgement j);
Judgement judgement_from_name(std::string_view name);        // throws UnknownTag

// Agreement semantics: a token is classifiable iff both judges give the same
// non-ambiguous judgement.
std::optional<Classification> combine_judgments(Judgement a, Judgement b);

// One feature value: a positive integer, a vocabulary tag, or NA.
struct FeatureValue {
  enum class Kind : std::uint8_t { Numeric, Symbolic, Na };

  Kind kind = Kind::Na;
  int num = 0;        // valid iff kind == Numeric
  std::string tag;    // valid iff kind == Symbolic, canonical spelling

  static FeatureValue numeric(int v) { return {Kind::Numeric, v, {}}; }
  static FeatureValue symbolic(std::string tag) { return {Kind::Symbolic, 0, std::move(tag)}; }
  static FeatureValue na() { return {}; }

  bool is_na() const { return kind == Kind::Na; }
  bool operator==(const FeatureValue& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::Numeric) return num == o.num;
    if (kind == Kind::Symbolic) return tag == o.tag;
    return true;
  }
};

// Validating parse of one value of feature f from its text form.
// Throws NumericExpected / NonPositive / UnknownTag / NaNotAllowed.
FeatureValue parse_value(FeatureId f, std::string_view text);
std::string render_value(const FeatureValue& v);

// A -> A*: complex accents collapse to "complex"; H*, L*, deaccented and
// ambiguous map to themselves. Total and idempotent on the union of both
// vocabularies.
FeatureValue abstract_accent(const FeatureValue& accent);
// O-P -> O-P* and O-S -> O-S*: any actual boundary mark becomes true,
// "false" stays false, NA stays NA.
FeatureValue abstract_orthography(const FeatureValue& orth);

// One classified (or to-be-classified) token. Feature slots may be absent
// after projection; label and judges may each be absent depending on the
// corpus variant.
struct Example {
  std::array<std::optional<FeatureValue>, kFeatureCount> values;
  std::optional<Classification> label;
  std::optional<std::pair<Judgement, Judgement>> judges;

  bool has(FeatureId f) const { return values[index_of(f)].has_value(); }
  const FeatureValue& at(FeatureId f) const;       // throws MissingFeature
  void set(FeatureId f, FeatureValue v) { values[index_of(f)] = std::move(v); }
};

// Validates vocabulary membership of every present value and consistency of
// the abstract fields with their sources. Throws on violation.
void validate_example(const Example& e);

// A named feature subset from the catalog, members in schema order.
struct FeatureSet {
  std::string name;
  std::vector<FeatureId> members;

  bool contains(FeatureId f) const;
};

// The full experiment catalog: 14 single-feature sets, 14 multi-feature
// sets, and the 28 "+" variants that add the lexeme, in that order.
const std::vector<FeatureSet>& catalog();
// Case-insensitive lookup by catalog name. Throws UnknownTag.
const FeatureSet& catalog_set(std::string_view name);

// Copy of e restricted to s (label and judges kept).
Example project(const Example& e, const FeatureSet& s);

}  // namespace cuelearn
