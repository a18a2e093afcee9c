#include "cuelearn/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cuelearn/error.hpp"
#include "cuelearn/rng.hpp"

namespace cuelearn {

namespace {

const std::string kBaseHeader =
    "p_len,p_pos,i_len,i_pos,i_comp,accent,accent_abs,cue_prec,cue_succ,"
    "orth_prec,orth_prec_abs,orth_succ,orth_succ_abs,pos,token";
const std::string kClassHeader = kBaseHeader + ",class";
const std::string kJudgeHeader = kBaseHeader + ",judge1,judge2";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

Corpus parse_corpus(const std::string& text) {
  Corpus out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  bool judge_variant = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    std::string line = text.substr(pos, end == std::string::npos ? std::string::npos
                                                                 : end - pos);
    pos = end == std::string::npos ? text.size() : end + 1;
    ++line_no;
    if (line.find('\r') != std::string::npos)
      throw Error(Errc::Parse, "carriage return in input", line_no);
    if (!saw_header) {
      if (!line.empty() && line[0] == '#') {
        std::size_t body = line.size() > 1 && line[1] == ' ' ? 2 : 1;
        if (!out.provenance.empty()) out.provenance += '\n';
        out.provenance += line.substr(body);
        continue;
      }
      if (line == kClassHeader) {
        judge_variant = false;
      } else if (line == kJudgeHeader) {
        judge_variant = true;
      } else {
        throw Error(Errc::Parse, "unrecognized header", line_no);
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) {
      if (pos >= text.size()) break;  // tolerate nothing after the final newline
      throw Error(Errc::Parse, "empty line", line_no);
    }
    std::vector<std::string> fields = split_fields(line);
    const std::size_t expected = kFeatureCount + (judge_variant ? 2 : 1);
    if (fields.size() != expected)
      throw Error(Errc::Parse,
                  "expected " + std::to_string(expected) + " fields, got " +
                      std::to_string(fields.size()),
                  line_no);
    Example e;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      try {
        e.set(feature_at(i), parse_value(feature_at(i), fields[i]));
      } catch (const Error& err) {
        throw Error(err.code(), err.detail(), line_no, i + 1);
      }
    }
    try {
      if (judge_variant) {
        e.judges = {judgement_from_name(fields[kFeatureCount]),
                    judgement_from_name(fields[kFeatureCount + 1])};
      } else {
        e.label = class_from_name(fields[kFeatureCount]);
      }
      validate_example(e);
    } catch (const Error& err) {
      throw Error(err.code(), err.detail(), line_no);
    }
    out.examples.push_back(std::move(e));
  }
  if (!saw_header) throw Error(Errc::Parse, "missing header", line_no ? line_no : 1);
  return out;
}

std::string render_corpus(const Corpus& c) {
  bool judge_variant = false;
  if (!c.examples.empty()) {
    const Example& first = c.examples.front();
    if (first.label) {
      judge_variant = false;
    } else if (first.judges) {
      judge_variant = true;
    } else {
      throw Error(Errc::MissingLabel, "corpus has neither labels nor judgements");
    }
  }
  std::string out;
  if (!c.provenance.empty()) {
    std::size_t start = 0;
    while (start <= c.provenance.size()) {
      std::size_t end = c.provenance.find('\n', start);
      std::string piece = c.provenance.substr(
          start, end == std::string::npos ? std::string::npos : end - start);
      out += "# " + piece + "\n";
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  out += judge_variant ? kJudgeHeader : kClassHeader;
  out += '\n';
  for (const Example& e : c.examples) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      if (i) out += ',';
      out += render_value(e.at(feature_at(i)));
    }
    if (judge_variant) {
      if (!e.judges)
        throw Error(Errc::MissingJudges, "corpus mixes judged and unjudged examples");
      out += ',';
      out += judgement_name(e.judges->first);
      out += ',';
      out += judgement_name(e.judges->second);
    } else {
      if (!e.label)
        throw Error(Errc::MissingLabel, "corpus mixes labeled and unlabeled examples");
      out += ',';
      out += class_name(*e.label);
    }
    out += '\n';
  }
  return out;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

void save_corpus(const Corpus& c, const std::filesystem::path& path) {
  std::string text = render_corpus(c);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

Corpus combine_and_filter_classifiable(const Corpus& c) {
  Corpus out;
  out.provenance = c.provenance;
  for (const Example& e : c.examples) {
    if (!e.judges)
      throw Error(Errc::MissingJudges, "example carries no judgements");
    auto cls = combine_judgments(e.judges->first, e.judges->second);
    if (!cls) continue;
    Example kept = e;
    kept.judges.reset();
    kept.label = *cls;
    out.examples.push_back(std::move(kept));
  }
  if (!out.provenance.empty()) out.provenance += '\n';
  out.provenance += "filter: combine-judges kept " + std::to_string(out.size()) +
                    " of " + std::to_string(c.size());
  return out;
}

Corpus filter_non_conjuncts(const Corpus& c) {
  Corpus out;
  out.provenance = c.provenance;
  for (const Example& e : c.examples) {
    const FeatureValue& t = e.at(FeatureId::Token);
    if (t.tag == "and" || t.tag == "or" || t.tag == "but") continue;
    out.examples.push_back(e);
  }
  if (!out.provenance.empty()) out.provenance += '\n';
  out.provenance += "filter: drop-conjuncts kept " + std::to_string(out.size()) +
                    " of " + std::to_string(c.size());
  return out;
}

// --- Synthetic corpora ---

namespace {

const std::vector<FeatureId>& sampled_symbolic_features() {
  static const std::vector<FeatureId> fs = {
      FeatureId::InterComp, FeatureId::Accent,   FeatureId::CuePrec,
      FeatureId::CueSucc,   FeatureId::OrthPrec, FeatureId::OrthSucc,
      FeatureId::Pos,       FeatureId::Token,
  };
  return fs;
}

void check_range(const NumericRange& r, const char* which) {
  if (r.lo < 1 || r.hi < r.lo)
    throw Error(Errc::InvalidSpec, std::string(which) + " range must satisfy 1 <= lo <= hi");
}

void check_marginals(const Marginals& m) {
  check_range(m.phrase_len, "phrase length");
  check_range(m.inter_len, "intermediate length");
  for (const auto& [f, weights] : m.symbolic) {
    const auto& fs = sampled_symbolic_features();
    if (std::find(fs.begin(), fs.end(), f) == fs.end())
      throw Error(Errc::InvalidSpec,
                  std::string(short_name(f)) + " is not a sampled feature");
  }
  for (FeatureId f : sampled_symbolic_features()) {
    auto it = m.symbolic.find(f);
    if (it == m.symbolic.end() || it->second.empty())
      throw Error(Errc::InvalidSpec,
                  "no distribution for " + std::string(short_name(f)));
    double total = 0.0;
    std::vector<std::string> seen;
    for (const auto& [value, weight] : it->second) {
      if (!(weight >= 0.0) || !std::isfinite(weight))
        throw Error(Errc::InvalidSpec,
                    "negative or non-finite weight for " + std::string(short_name(f)));
      if (std::find(seen.begin(), seen.end(), value) != seen.end())
        throw Error(Errc::InvalidSpec, "duplicate value '" + value + "' for " +
                                           std::string(short_name(f)));
      seen.push_back(value);
      if (value == "NA") {
        if (!na_allowed(f))
          throw Error(Errc::InvalidSpec,
                      "NA weight on " + std::string(short_name(f)));
      } else {
        const auto& vocab = vocabulary(f);
        if (std::find(vocab.begin(), vocab.end(), value) == vocab.end())
          throw Error(Errc::InvalidSpec, "'" + value + "' is not a value of " +
                                             std::string(short_name(f)));
      }
      total += weight;
    }
    if (!(total > 0.0))
      throw Error(Errc::InvalidSpec,
                  "zero total weight for " + std::string(short_name(f)));
  }
}

FeatureValue draw_symbolic(Rng& rng, const std::vector<std::pair<std::string, double>>& weights) {
  double total = 0.0;
  for (const auto& [value, weight] : weights) total += weight;
  const double u = rng.unit() * total;
  double acc = 0.0;
  for (const auto& [value, weight] : weights) {
    acc += weight;
    if (u < acc) return value == "NA" ? FeatureValue::na() : FeatureValue::symbolic(value);
  }
  const auto& last = weights.back().first;
  return last == "NA" ? FeatureValue::na() : FeatureValue::symbolic(last);
}

std::string format_double_short(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

Marginals Marginals::defaults() {
  Marginals m;
  for (FeatureId f : sampled_symbolic_features()) {
    std::vector<std::pair<std::string, double>> weights;
    const auto& vocab = vocabulary(f);
    const bool with_na = na_allowed(f);
    const double share = with_na ? 0.95 / static_cast<double>(vocab.size())
                                 : 1.0 / static_cast<double>(vocab.size());
    for (const std::string& tag : vocab) weights.emplace_back(tag, share);
    if (with_na) weights.emplace_back("NA", 0.05);
    m.symbolic[f] = std::move(weights);
  }
  return m;
}

Corpus generate(const GenSpec& spec) {
  if (spec.n < 1) throw Error(Errc::InvalidSpec, "n must be >= 1");
  if (!spec.labeler) throw Error(Errc::InvalidSpec, "labeler must be set");
  if (!(spec.noise >= 0.0 && spec.noise <= 1.0))
    throw Error(Errc::InvalidSpec, "noise must lie in [0,1]");
  check_marginals(spec.marginals);

  Rng rng(spec.seed);
  const Marginals& m = spec.marginals;
  Corpus out;
  out.provenance = "generated: n=" + std::to_string(spec.n) +
                   " noise=" + format_double_short(spec.noise) +
                   " seed=" + std::to_string(spec.seed);
  out.examples.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    Example e;
    const int p_len = rng.int_in(m.phrase_len.lo, m.phrase_len.hi);
    e.set(FeatureId::PhraseLen, FeatureValue::numeric(p_len));
    e.set(FeatureId::PhrasePos, FeatureValue::numeric(rng.int_in(1, p_len)));
    const int i_len = rng.int_in(m.inter_len.lo, m.inter_len.hi);
    e.set(FeatureId::InterLen, FeatureValue::numeric(i_len));
    e.set(FeatureId::InterPos, FeatureValue::numeric(rng.int_in(1, i_len)));
    e.set(FeatureId::InterComp, draw_symbolic(rng, m.symbolic.at(FeatureId::InterComp)));
    FeatureValue accent = draw_symbolic(rng, m.symbolic.at(FeatureId::Accent));
    e.set(FeatureId::AccentStar, abstract_accent(accent));
    e.set(FeatureId::Accent, std::move(accent));
    e.set(FeatureId::CuePrec, draw_symbolic(rng, m.symbolic.at(FeatureId::CuePrec)));
    e.set(FeatureId::CueSucc, draw_symbolic(rng, m.symbolic.at(FeatureId::CueSucc)));
    FeatureValue orth_prec = draw_symbolic(rng, m.symbolic.at(FeatureId::OrthPrec));
    e.set(FeatureId::OrthPrecStar, abstract_orthography(orth_prec));
    e.set(FeatureId::OrthPrec, std::move(orth_prec));
    FeatureValue orth_succ = draw_symbolic(rng, m.symbolic.at(FeatureId::OrthSucc));
    e.set(FeatureId::OrthSuccStar, abstract_orthography(orth_succ));
    e.set(FeatureId::OrthSucc, std::move(orth_succ));
    e.set(FeatureId::Pos, draw_symbolic(rng, m.symbolic.at(FeatureId::Pos)));
    e.set(FeatureId::Token, draw_symbolic(rng, m.symbolic.at(FeatureId::Token)));
    Classification label = spec.labeler(e);
    // Drawn unconditionally so the feature stream does not depend on noise.
    const double flip = rng.unit();
    if (flip < spec.noise) label = opposite(label);
    e.label = label;
    out.examples.push_back(std::move(e));
  }
  return out;
}

// --- Intonational well-formedness ---

namespace {

const std::array<std::string_view, kToneCount>& tone_names() {
  static const std::array<std::string_view, kToneCount> names = {
      "H*", "L*", "L*+H", "L+H*", "H*+L", "H+L*", "H-", "L-", "H%", "L%"};
  return names;
}

}  // namespace

std::string_view tone_name(Tone t) { return tone_names()[static_cast<std::size_t>(t)]; }

Tone tone_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kToneCount; ++i)
    if (tone_names()[i] == name) return static_cast<Tone>(i);
  throw Error(Errc::UnknownTag, "'" + std::string(name) + "' is not a tone");
}

bool is_pitch_accent(Tone t) { return static_cast<std::size_t>(t) < 6; }
bool is_phrase_accent(Tone t) { return t == Tone::HPhrase || t == Tone::LPhrase; }
bool is_boundary_tone(Tone t) { return t == Tone::HBoundary || t == Tone::LBoundary; }

ToneCheck validate_tones(const std::vector<Tone>& tones) {
  enum class State { ExpectFirstAccent, InAccents, AfterPhraseAccent, Complete };
  State state = State::ExpectFirstAccent;
  for (std::size_t i = 0; i < tones.size(); ++i) {
    const Tone t = tones[i];
    switch (state) {
      case State::ExpectFirstAccent:
        if (!is_pitch_accent(t)) return {false, i};
        state = State::InAccents;
        break;
      case State::InAccents:
        if (is_pitch_accent(t)) break;
        if (is_phrase_accent(t)) {
          state = State::AfterPhraseAccent;
          break;
        }
        return {false, i};
      case State::AfterPhraseAccent:
        if (is_pitch_accent(t)) {
          state = State::InAccents;
          break;
        }
        if (is_boundary_tone(t)) {
          state = State::Complete;
          break;
        }
        return {false, i};
      case State::Complete:
        return {false, i};
    }
  }
  if (state == State::Complete) return {true, tones.size()};
  return {false, tones.size()};
}

}  // namespace cuelearn
