#include <doctest.h>

#include <cmath>
#include <string>

#include "cuelearn/baselines.hpp"
#include "cuelearn/corpus.hpp"
#include "cuelearn/error.hpp"
#include "oracle.hpp"

using namespace cuelearn;

namespace {

const std::string kHeader =
    "p_len,p_pos,i_len,i_pos,i_comp,accent,accent_abs,cue_prec,cue_succ,"
    "orth_prec,orth_prec_abs,orth_succ,orth_succ_abs,pos,token";

// The two worked examples of the schema: a discourse use of "now" opening a
// paragraph as its own intermediate phrase, and a sentential use mid-phrase.
const std::string kTwoRows =
    kHeader + ",class\n" +
    "9,1,1,1,only,H*+L,complex,false,true,paragraph,true,false,false,adverb,now,"
    "discourse\n" +
    "9,2,8,1,other,H*,H*,true,false,false,false,false,false,adverb,now,"
    "sentential\n";

Errc code_of(const std::string& text, std::size_t* line = nullptr,
             std::size_t* column = nullptr) {
  try {
    parse_corpus(text);
  } catch (const Error& e) {
    if (line) *line = e.line();
    if (column) *column = e.column();
    return e.code();
  }
  return Errc::Io;  // not reached in these tests
}

}  // namespace

TEST_CASE("corpus round-trip") {
  const Corpus c = parse_corpus(kTwoRows);
  REQUIRE(c.size() == 2);
  CHECK(c.provenance.empty());
  const Example& first = c.examples[0];
  CHECK(first.at(FeatureId::PhraseLen).num == 9);
  CHECK(first.at(FeatureId::InterComp).tag == "only");
  CHECK(first.at(FeatureId::OrthPrec).tag == "paragraph");
  CHECK(first.label == Classification::Discourse);
  const Example& second = c.examples[1];
  CHECK(second.at(FeatureId::InterLen).num == 8);
  CHECK(second.at(FeatureId::Accent).tag == "H*");
  CHECK(second.label == Classification::Sentential);

  CHECK(render_corpus(c) == kTwoRows);
}

TEST_CASE("judge variant round-trip") {
  const std::string text =
      kHeader + ",judge1,judge2\n" +
      "9,1,1,1,only,H*+L,complex,false,true,paragraph,true,false,false,adverb,now,"
      "discourse,ambiguous\n";
  const Corpus c = parse_corpus(text);
  REQUIRE(c.size() == 1);
  CHECK(!c.examples[0].label.has_value());
  REQUIRE(c.examples[0].judges.has_value());
  CHECK(c.examples[0].judges->first == Judgement::Discourse);
  CHECK(c.examples[0].judges->second == Judgement::Ambiguous);
  CHECK(render_corpus(c) == text);
}

TEST_CASE("provenance comments") {
  Corpus c = parse_corpus(kTwoRows);
  c.provenance = "gen: n=2\nfilter: none";
  const std::string text = render_corpus(c);
  CHECK(text.rfind("# gen: n=2\n# filter: none\n" + kHeader, 0) == 0);
  const Corpus back = parse_corpus(text);
  CHECK(back.provenance == c.provenance);
  CHECK(render_corpus(back) == text);
}

TEST_CASE("corpus parse errors carry positions") {
  std::size_t line = 0, column = 0;

  CHECK(code_of("nonsense\n") == Errc::Parse);
  CHECK(code_of("") == Errc::Parse);

  // Wrong field count.
  CHECK(code_of(kHeader + ",class\n1,2\n", &line) == Errc::Parse);
  CHECK(line == 2);

  // Bad numeric value, 1-based column.
  std::string bad = kTwoRows;
  bad.replace(bad.find("9,1"), 3, "x,1");
  CHECK(code_of(bad, &line, &column) == Errc::NumericExpected);
  CHECK(line == 2);
  CHECK(column == 1);

  bad = kTwoRows;
  bad.replace(bad.find("9,2"), 3, "0,2");
  CHECK(code_of(bad, &line, &column) == Errc::NonPositive);
  CHECK(line == 3);
  CHECK(column == 1);

  bad = kTwoRows;
  bad.replace(bad.find("adverb"), 6, "gerund");
  CHECK(code_of(bad, &line, &column) == Errc::UnknownTag);
  CHECK(line == 2);
  CHECK(column == 14);

  bad = kTwoRows;
  bad.replace(bad.find("9,1,1,1"), 7, "NA,1,1,1");
  CHECK(code_of(bad, &line, &column) == Errc::NaNotAllowed);
  CHECK(column == 1);

  // A* inconsistent with A.
  bad = kTwoRows;
  bad.replace(bad.find("H*+L,complex"), 12, "H*+L,H*");
  CHECK(code_of(bad, &line) == Errc::AbstractionMismatch);
  CHECK(line == 2);

  // Unknown class name.
  bad = kTwoRows;
  bad.replace(bad.find("discourse\n"), 9, "discours4");
  CHECK(code_of(bad) == Errc::UnknownTag);

  // Structural defects: carriage returns and interior empty lines.
  CHECK(code_of(kHeader + ",class\r\n") == Errc::Parse);
  bad = kTwoRows;
  bad.insert(bad.find("9,2"), "\n");
  CHECK(code_of(bad, &line) == Errc::Parse);
  CHECK(line == 3);
}

TEST_CASE("judge combination filter") {
  std::string text = kHeader + ",judge1,judge2\n";
  const char* names[] = {"discourse", "sentential", "ambiguous"};
  for (const char* a : names)
    for (const char* b : names)
      text += "9,1,1,1,only,H*+L,complex,false,true,paragraph,true,false,false,"
              "adverb,now," + std::string(a) + "," + b + "\n";
  const Corpus judged = parse_corpus(text);
  REQUIRE(judged.size() == 9);

  const Corpus combined = combine_and_filter_classifiable(judged);
  REQUIRE(combined.size() == 2);
  CHECK(combined.examples[0].label == Classification::Discourse);
  CHECK(combined.examples[1].label == Classification::Sentential);
  CHECK(!combined.examples[0].judges.has_value());
  CHECK(combined.provenance.find("combine-judges kept 2 of 9") != std::string::npos);

  // Asking for judge combination without judges is an error.
  const Corpus labeled = parse_corpus(kTwoRows);
  CHECK_THROWS_AS(combine_and_filter_classifiable(labeled), Error);
}

TEST_CASE("conjunct filter") {
  GenSpec spec;
  spec.n = 400;
  spec.labeler = majority_model;
  spec.seed = 11;
  const Corpus c = generate(spec);
  const Corpus kept = filter_non_conjuncts(c);
  std::size_t conjuncts = 0;
  for (const Example& e : c.examples) {
    const std::string& t = e.at(FeatureId::Token).tag;
    if (t == "and" || t == "or" || t == "but") ++conjuncts;
  }
  CHECK(conjuncts > 0);  // 3 of 34 lexemes; all but certain at n=400
  CHECK(kept.size() == c.size() - conjuncts);
  for (const Example& e : kept.examples) {
    const std::string& t = e.at(FeatureId::Token).tag;
    CHECK(t != "and");
    CHECK(t != "or");
    CHECK(t != "but");
  }
}

TEST_CASE("generator determinism and validity") {
  GenSpec spec;
  spec.n = 300;
  spec.labeler = prosodic_model;
  spec.noise = 0.15;
  spec.seed = 42;
  const Corpus a = generate(spec);
  const Corpus b = generate(spec);
  CHECK(render_corpus(a) == render_corpus(b));
  REQUIRE(a.size() == 300);
  for (const Example& e : a.examples) {
    CHECK_NOTHROW(validate_example(e));
    REQUIRE(e.label.has_value());
    const int p_len = e.at(FeatureId::PhraseLen).num;
    const int p_pos = e.at(FeatureId::PhrasePos).num;
    CHECK(p_len >= 1);
    CHECK(p_len <= 12);
    CHECK(p_pos >= 1);
    CHECK(p_pos <= p_len);
    const int i_len = e.at(FeatureId::InterLen).num;
    const int i_pos = e.at(FeatureId::InterPos).num;
    CHECK(i_pos >= 1);
    CHECK(i_pos <= i_len);
  }
}

TEST_CASE("generator respects the labeler at zero noise") {
  GenSpec spec;
  spec.n = 500;
  spec.labeler = textual_model;
  spec.noise = 0.0;
  spec.seed = 7;
  const Corpus c = generate(spec);
  for (const Example& e : c.examples) {
    Example probe = e;
    probe.label.reset();
    CHECK(*e.label == textual_model(probe));
  }
}

TEST_CASE("generator noise flips at the nominal rate") {
  GenSpec spec;
  spec.n = 2000;
  spec.labeler = prosodic_model;
  spec.noise = 0.15;
  spec.seed = 5;
  const Corpus c = generate(spec);
  std::size_t flips = 0;
  for (const Example& e : c.examples) {
    Example probe = e;
    probe.label.reset();
    if (*e.label != prosodic_model(probe)) ++flips;
  }
  const double p = 0.15;
  const double bound = 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(spec.n));
  const double empirical = static_cast<double>(flips) / static_cast<double>(spec.n);
  CHECK(std::fabs(empirical - p) <= bound);
}

TEST_CASE("noise does not perturb the feature stream") {
  GenSpec spec;
  spec.n = 50;
  spec.labeler = majority_model;
  spec.seed = 9;
  spec.noise = 0.0;
  const Corpus clean = generate(spec);
  spec.noise = 0.5;
  const Corpus noisy = generate(spec);
  REQUIRE(clean.size() == noisy.size());
  for (std::size_t i = 0; i < clean.size(); ++i)
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      const FeatureId f = feature_at(k);
      CHECK(clean.examples[i].at(f) == noisy.examples[i].at(f));
    }
}

TEST_CASE("generator specification errors") {
  GenSpec spec;
  spec.labeler = majority_model;
  spec.n = 0;
  CHECK_THROWS_AS(generate(spec), Error);
  spec.n = 10;
  spec.noise = -0.1;
  CHECK_THROWS_AS(generate(spec), Error);
  spec.noise = 1.1;
  CHECK_THROWS_AS(generate(spec), Error);
  spec.noise = 0.0;
  spec.labeler = nullptr;
  CHECK_THROWS_AS(generate(spec), Error);
  spec.labeler = majority_model;

  spec.marginals.phrase_len = {0, 12};
  CHECK_THROWS_AS(generate(spec), Error);
  spec.marginals = Marginals::defaults();
  spec.marginals.inter_len = {5, 4};
  CHECK_THROWS_AS(generate(spec), Error);

  spec.marginals = Marginals::defaults();
  spec.marginals.symbolic[FeatureId::Accent].push_back({"NA", 0.1});
  CHECK_THROWS_AS(generate(spec), Error);

  spec.marginals = Marginals::defaults();
  spec.marginals.symbolic[FeatureId::Token].push_back({"maybe", 0.1});
  CHECK_THROWS_AS(generate(spec), Error);

  spec.marginals = Marginals::defaults();
  spec.marginals.symbolic[FeatureId::Pos][0].second = -0.5;
  CHECK_THROWS_AS(generate(spec), Error);

  spec.marginals = Marginals::defaults();
  for (auto& [value, weight] : spec.marginals.symbolic[FeatureId::InterComp])
    weight = 0.0;
  CHECK_THROWS_AS(generate(spec), Error);

  spec.marginals = Marginals::defaults();
  CHECK_NOTHROW(generate(spec));
}

TEST_CASE("custom marginals steer sampling") {
  GenSpec spec;
  spec.n = 120;
  spec.labeler = majority_model;
  spec.seed = 3;
  spec.marginals.symbolic[FeatureId::InterComp] = {{"other", 1.0}};
  spec.marginals.symbolic[FeatureId::Token] = {{"now", 2.0}, {"well", 1.0}};
  spec.marginals.phrase_len = {4, 4};
  const Corpus c = generate(spec);
  for (const Example& e : c.examples) {
    CHECK(e.at(FeatureId::InterComp).tag == "other");
    CHECK(e.at(FeatureId::PhraseLen).num == 4);
    CHECK(e.at(FeatureId::PhrasePos).num <= 4);
    const std::string& t = e.at(FeatureId::Token).tag;
    CHECK((t == "now" || t == "well"));
  }
}

TEST_CASE("tone inventory") {
  const char* names[] = {"H*", "L*", "L*+H", "L+H*", "H*+L",
                         "H+L*", "H-", "L-", "H%", "L%"};
  for (std::size_t i = 0; i < kToneCount; ++i) {
    const Tone t = static_cast<Tone>(i);
    CHECK(tone_name(t) == names[i]);
    CHECK(tone_from_name(names[i]) == t);
    const int cat = (is_pitch_accent(t) ? 1 : 0) + (is_phrase_accent(t) ? 1 : 0) +
                    (is_boundary_tone(t) ? 1 : 0);
    CHECK(cat == 1);
    CHECK(is_pitch_accent(t) == (i < 6));
    CHECK(is_phrase_accent(t) == (i == 6 || i == 7));
    CHECK(is_boundary_tone(t) == (i >= 8));
  }
  CHECK_THROWS_AS(tone_from_name("M*"), Error);
}

TEST_CASE("tone sequence checks") {
  const auto seq = [](std::initializer_list<const char*> names) {
    std::vector<Tone> out;
    for (const char* n : names) out.push_back(tone_from_name(n));
    return out;
  };
  const auto check = [](const std::vector<Tone>& tones, bool ok, std::size_t pos) {
    const ToneCheck r = validate_tones(tones);
    CHECK(r.accepted == ok);
    CHECK(r.position == pos);
  };

  check(seq({"H*", "L-", "L%"}), true, 3);
  check(seq({"H*", "H*", "L*+H", "H-", "L+H*", "L-", "H%"}), true, 7);
  check(seq({"L*", "H-", "H%"}), true, 3);

  check(seq({}), false, 0);
  check(seq({"H*"}), false, 1);
  check(seq({"H*", "L-"}), false, 2);
  check(seq({"L%"}), false, 0);
  check(seq({"H-"}), false, 0);
  check(seq({"H*", "H%"}), false, 1);
  check(seq({"H*", "L-", "L-"}), false, 2);
  check(seq({"H*", "L-", "L%", "H*"}), false, 3);
  check(seq({"H*", "L-", "L%", "L%"}), false, 3);
  check(seq({"H*", "L-", "H*", "H%"}), false, 3);
}

TEST_CASE("tone checker agrees with the regular-expression oracle") {
  // Exhaustive over lengths 0..3 here; the acceptance suite extends this.
  for (std::size_t len = 0; len <= 3; ++len) {
    std::vector<std::size_t> digits(len, 0);
    while (true) {
      std::vector<Tone> tones;
      std::string encoded;
      for (std::size_t d : digits) {
        tones.push_back(static_cast<Tone>(d));
        encoded += oracle::tone_category(d);
      }
      const ToneCheck got = validate_tones(tones);
      const oracle::ToneOracle want = oracle::tone_check(encoded);
      CHECK(got.accepted == want.accepted);
      CHECK(got.position == want.position);
      std::size_t i = 0;
      for (; i < len; ++i) {
        if (++digits[i] < kToneCount) break;
        digits[i] = 0;
      }
      if (i == len) break;
    }
  }
}
