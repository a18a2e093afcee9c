#include "cuelearn/schema.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace cuelearn {

namespace {

struct FeatureInfo {
  std::string_view short_name;
  std::string_view header_name;
  std::string_view long_name;
  bool numeric;
  bool na_allowed;
  std::vector<std::string> vocab;
};

const std::array<FeatureInfo, kFeatureCount>& feature_table() {
  static const std::array<FeatureInfo, kFeatureCount> table = {{
      {"P-L", "p_len", "length of intonational phrase", true, false, {}},
      {"P-P", "p_pos", "position in intonational phrase", true, false, {}},
      {"I-L", "i_len", "length of intermediate phrase", true, false, {}},
      {"I-P", "i_pos", "position in intermediate phrase", true, false, {}},
      {"I-C", "i_comp", "composition of intermediate phrase", false, false,
       {"only", "only_cue", "other"}},
      {"A", "accent", "accent", false, false,
       {"H*", "L*", "L*+H", "L+H*", "H*+L", "H+L*", "deaccented", "ambiguous"}},
      {"A*", "accent_abs", "accent, abstracted", false, false,
       {"H*", "L*", "complex", "deaccented", "ambiguous"}},
      {"C-P", "cue_prec", "preceding cue phrase", false, true, {"true", "false"}},
      {"C-S", "cue_succ", "succeeding cue phrase", false, true, {"true", "false"}},
      {"O-P", "orth_prec", "preceding orthography", false, true,
       {"comma", "dash", "period", "paragraph", "false"}},
      {"O-P*", "orth_prec_abs", "preceding orthography, abstracted", false, true,
       {"true", "false"}},
      {"O-S", "orth_succ", "succeeding orthography", false, true,
       {"comma", "dash", "period", "false"}},
      {"O-S*", "orth_succ_abs", "succeeding orthography, abstracted", false, true,
       {"true", "false"}},
      {"POS", "pos", "part of speech", false, true,
       {"article", "coordinating_conjunction", "cardinal_numeral",
        "subordinating_conjunction", "preposition", "adjective",
        "singular_or_mass_noun", "singular_proper_noun", "intensifier",
        "adverb", "verb_base_form"}},
      {"T", "token", "lexeme", false, false,
       {"actually", "also", "although", "and", "basically", "because", "but",
        "essentially", "except", "finally", "first", "further", "generally",
        "however", "indeed", "like", "look", "next", "no", "now", "ok", "or",
        "otherwise", "right", "say", "second", "see", "similarly", "since",
        "so", "then", "therefore", "well", "yes"}},
  }};
  return table;
}

const FeatureInfo& info(FeatureId f) { return feature_table()[index_of(f)]; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

FeatureId feature_at(std::size_t index) {
  if (index >= kFeatureCount)
    throw Error(Errc::UnknownTag, "feature index " + std::to_string(index) + " out of range");
  return static_cast<FeatureId>(index);
}

std::string_view short_name(FeatureId f) { return info(f).short_name; }
std::string_view header_name(FeatureId f) { return info(f).header_name; }
std::string_view long_name(FeatureId f) { return info(f).long_name; }

FeatureId feature_from_short(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (feature_table()[i].short_name == name) return static_cast<FeatureId>(i);
  throw Error(Errc::UnknownTag, "unknown feature name '" + std::string(name) + "'");
}

FeatureId feature_from_header(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (feature_table()[i].header_name == name) return static_cast<FeatureId>(i);
  throw Error(Errc::UnknownTag, "unknown feature column '" + std::string(name) + "'");
}

bool is_numeric(FeatureId f) { return info(f).numeric; }
bool na_allowed(FeatureId f) { return info(f).na_allowed; }
const std::vector<std::string>& vocabulary(FeatureId f) { return info(f).vocab; }

Classification opposite(Classification c) {
  return c == Classification::Discourse ? Classification::Sentential
                                        : Classification::Discourse;
}

std::string_view class_name(Classification c) {
  return c == Classification::Discourse ? "discourse" : "sentential";
}

Classification class_from_name(std::string_view name) {
  if (name == "discourse") return Classification::Discourse;
  if (name == "sentential") return Classification::Sentential;
  throw Error(Errc::UnknownTag, "unknown class '" + std::string(name) + "'");
}

std::string_view judgement_name(Judgement j) {
  switch (j) {
    case Judgement::Discourse: return "discourse";
    case Judgement::Sentential: return "sentential";
    default: return "ambiguous";
  }
}

Judgement judgement_from_name(std::string_view name) {
  if (name == "discourse") return Judgement::Discourse;
  if (name == "sentential") return Judgement::Sentential;
  if (name == "ambiguous") return Judgement::Ambiguous;
  throw Error(Errc::UnknownTag, "unknown judgement '" + std::string(name) + "'");
}

std::optional<Classification> combine_judgments(Judgement a, Judgement b) {
  if (a != b || a == Judgement::Ambiguous) return std::nullopt;
  return a == Judgement::Discourse ? Classification::Discourse
                                   : Classification::Sentential;
}

FeatureValue parse_value(FeatureId f, std::string_view text) {
  const FeatureInfo& fi = info(f);
  if (text == "NA") {
    if (!fi.na_allowed)
      throw Error(Errc::NaNotAllowed,
                  "NA is not a legal value of " + std::string(fi.short_name));
    return FeatureValue::na();
  }
  if (fi.numeric) {
    int v = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      throw Error(Errc::NumericExpected, std::string(fi.short_name) +
                                             " expects an integer, got '" +
                                             std::string(text) + "'");
    if (v < 1)
      throw Error(Errc::NonPositive, std::string(fi.short_name) +
                                         " must be >= 1, got " + std::to_string(v));
    return FeatureValue::numeric(v);
  }
  for (const std::string& tag : fi.vocab)
    if (tag == text) return FeatureValue::symbolic(tag);
  throw Error(Errc::UnknownTag, "'" + std::string(text) + "' is not a value of " +
                                    std::string(fi.short_name));
}

std::string render_value(const FeatureValue& v) {
  switch (v.kind) {
    case FeatureValue::Kind::Numeric: return std::to_string(v.num);
    case FeatureValue::Kind::Symbolic: return v.tag;
    default: return "NA";
  }
}

FeatureValue abstract_accent(const FeatureValue& accent) {
  if (accent.kind != FeatureValue::Kind::Symbolic)
    throw Error(Errc::UnknownTag, "accent abstraction needs a symbolic value");
  const std::string& t = accent.tag;
  if (t == "L*+H" || t == "L+H*" || t == "H*+L" || t == "H+L*")
    return FeatureValue::symbolic("complex");
  if (t == "H*" || t == "L*" || t == "complex" || t == "deaccented" || t == "ambiguous")
    return accent;
  throw Error(Errc::UnknownTag, "'" + t + "' is not an accent value");
}

FeatureValue abstract_orthography(const FeatureValue& orth) {
  if (orth.is_na()) return orth;
  if (orth.kind != FeatureValue::Kind::Symbolic)
    throw Error(Errc::UnknownTag, "orthography abstraction needs a symbolic value");
  const std::string& t = orth.tag;
  if (t == "comma" || t == "dash" || t == "period" || t == "paragraph" || t == "true")
    return FeatureValue::symbolic("true");
  if (t == "false") return orth;
  throw Error(Errc::UnknownTag, "'" + t + "' is not an orthography value");
}

const FeatureValue& Example::at(FeatureId f) const {
  const auto& slot = values[index_of(f)];
  if (!slot)
    throw Error(Errc::MissingFeature,
                "example has no value for " + std::string(short_name(f)));
  return *slot;
}

void validate_example(const Example& e) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const auto& slot = e.values[i];
    if (!slot) continue;
    FeatureId f = static_cast<FeatureId>(i);
    const FeatureInfo& fi = info(f);
    const FeatureValue& v = *slot;
    switch (v.kind) {
      case FeatureValue::Kind::Na:
        if (!fi.na_allowed)
          throw Error(Errc::NaNotAllowed,
                      "NA is not a legal value of " + std::string(fi.short_name));
        break;
      case FeatureValue::Kind::Numeric:
        if (!fi.numeric)
          throw Error(Errc::UnknownTag, std::string(fi.short_name) + " is symbolic");
        if (v.num < 1)
          throw Error(Errc::NonPositive, std::string(fi.short_name) + " must be >= 1");
        break;
      case FeatureValue::Kind::Symbolic:
        if (fi.numeric)
          throw Error(Errc::NumericExpected, std::string(fi.short_name) + " is numeric");
        if (std::find(fi.vocab.begin(), fi.vocab.end(), v.tag) == fi.vocab.end())
          throw Error(Errc::UnknownTag, "'" + v.tag + "' is not a value of " +
                                            std::string(fi.short_name));
        break;
    }
  }
  if (e.has(FeatureId::Accent) && e.has(FeatureId::AccentStar) &&
      !(abstract_accent(e.at(FeatureId::Accent)) == e.at(FeatureId::AccentStar)))
    throw Error(Errc::AbstractionMismatch, "A* does not abstract A");
  if (e.has(FeatureId::OrthPrec) && e.has(FeatureId::OrthPrecStar) &&
      !(abstract_orthography(e.at(FeatureId::OrthPrec)) == e.at(FeatureId::OrthPrecStar)))
    throw Error(Errc::AbstractionMismatch, "O-P* does not abstract O-P");
  if (e.has(FeatureId::OrthSucc) && e.has(FeatureId::OrthSuccStar) &&
      !(abstract_orthography(e.at(FeatureId::OrthSucc)) == e.at(FeatureId::OrthSuccStar)))
    throw Error(Errc::AbstractionMismatch, "O-S* does not abstract O-S");
}

bool FeatureSet::contains(FeatureId f) const {
  return std::find(members.begin(), members.end(), f) != members.end();
}

namespace {

std::vector<FeatureId> ids(std::initializer_list<FeatureId> l) { return {l}; }

std::vector<FeatureSet> build_catalog() {
  using F = FeatureId;
  std::vector<FeatureSet> sets;
  // Single-feature sets, one per observed feature, lexeme excluded.
  for (std::size_t i = 0; i + 1 < kFeatureCount; ++i) {
    FeatureId f = static_cast<FeatureId>(i);
    sets.push_back({std::string(short_name(f)), {f}});
  }
  // Multi-feature sets.
  sets.push_back({"prosody",
                  ids({F::PhraseLen, F::PhrasePos, F::InterLen, F::InterPos,
                       F::InterComp, F::Accent, F::AccentStar})});
  sets.push_back({"hl93features",
                  ids({F::InterPos, F::InterComp, F::Accent, F::AccentStar})});
  sets.push_back({"phrasing",
                  ids({F::PhraseLen, F::PhrasePos, F::InterLen, F::InterPos,
                       F::InterComp})});
  sets.push_back({"length", ids({F::PhraseLen, F::InterLen})});
  sets.push_back({"position", ids({F::PhrasePos, F::InterPos})});
  sets.push_back({"intonational", ids({F::PhraseLen, F::PhrasePos})});
  sets.push_back({"intermediate", ids({F::InterLen, F::InterPos, F::InterComp})});
  sets.push_back({"text",
                  ids({F::CuePrec, F::CueSucc, F::OrthPrec, F::OrthPrecStar,
                       F::OrthSucc, F::OrthSuccStar, F::Pos})});
  sets.push_back({"adjacency", ids({F::CuePrec, F::CueSucc})});
  sets.push_back({"orthography",
                  ids({F::OrthPrec, F::OrthPrecStar, F::OrthSucc, F::OrthSuccStar})});
  sets.push_back({"preceding", ids({F::CuePrec, F::OrthPrec, F::OrthPrecStar})});
  sets.push_back({"succeeding", ids({F::CueSucc, F::OrthSucc, F::OrthSuccStar})});
  {
    FeatureSet all{"speech-text", {}};
    for (std::size_t i = 0; i + 1 < kFeatureCount; ++i)
      all.members.push_back(static_cast<FeatureId>(i));
    sets.push_back(std::move(all));
  }
  sets.push_back({"speech-adj",
                  ids({F::PhraseLen, F::PhrasePos, F::InterLen, F::InterPos,
                       F::InterComp, F::Accent, F::AccentStar, F::CuePrec,
                       F::CueSucc})});
  // "+" variants: each set above plus the lexeme, same order.
  const std::size_t base_count = sets.size();
  for (std::size_t i = 0; i < base_count; ++i) {
    FeatureSet plus = sets[i];
    plus.name += "+";
    plus.members.push_back(F::Token);
    sets.push_back(std::move(plus));
  }
  return sets;
}

}  // namespace

const std::vector<FeatureSet>& catalog() {
  static const std::vector<FeatureSet> sets = build_catalog();
  return sets;
}

const FeatureSet& catalog_set(std::string_view name) {
  const std::string wanted = lower(name);
  for (const FeatureSet& s : catalog())
    if (lower(s.name) == wanted) return s;
  throw Error(Errc::UnknownTag, "unknown feature set '" + std::string(name) + "'");
}

Example project(const Example& e, const FeatureSet& s) {
  Example out;
  out.label = e.label;
  out.judges = e.judges;
  for (FeatureId f : s.members) out.values[index_of(f)] = e.values[index_of(f)];
  return out;
}

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::UnknownTag: return "unknown tag";
    case Errc::NumericExpected: return "numeric value expected";
    case Errc::NonPositive: return "non-positive value";
    case Errc::NaNotAllowed: return "NA not allowed";
    case Errc::AbstractionMismatch: return "abstraction mismatch";
    case Errc::MissingFeature: return "missing feature";
    case Errc::MissingLabel: return "missing label";
    case Errc::MissingJudges: return "missing judges";
    case Errc::EmptyFeatureSet: return "empty feature set";
    case Errc::EmptyCorpus: return "empty corpus";
    case Errc::EmptyDistribution: return "empty distribution";
    case Errc::ZeroCoverageBefore: return "zero coverage before refinement";
    case Errc::NoTargetExamples: return "no target examples";
    case Errc::PartitionMismatch: return "partition mismatch";
    case Errc::TooFewExamples: return "too few examples";
    case Errc::InvalidSpec: return "invalid spec";
    case Errc::Parse: return "parse error";
    case Errc::Io: return "io error";
  }
  return "error";
}

}  // namespace cuelearn
