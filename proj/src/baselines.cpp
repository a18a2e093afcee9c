#include "cuelearn/baselines.hpp"

#include "cuelearn/error.hpp"

namespace cuelearn {

BaselineDecision prosodic_decision(const Example& e) {
  const FeatureValue& comp = e.at(FeatureId::InterComp);
  if (comp.tag == "only" || comp.tag == "only_cue")
    return {Classification::Discourse, "1"};
  if (e.at(FeatureId::InterPos).num > 1) return {Classification::Sentential, "8"};
  const FeatureValue& accent = e.at(FeatureId::Accent);
  if (accent.tag == "deaccented") return {Classification::Discourse, "4"};
  if (accent.tag == "L*") return {Classification::Discourse, "5"};
  if (accent.tag == "H*") return {Classification::Sentential, "6"};
  if (abstract_accent(accent).tag == "complex") return {Classification::Sentential, "7"};
  return {Classification::Sentential, "fallback"};
}

BaselineDecision textual_decision(const Example& e) {
  const FeatureValue& orth = e.at(FeatureId::OrthPrecStar);
  if (orth.is_na()) return {Classification::Discourse, "fallback"};
  if (orth.tag == "true") return {Classification::Discourse, "9"};
  return {Classification::Sentential, "10"};
}

BaselineDecision majority_decision(const Example&) {
  return {Classification::Sentential, "majority"};
}

Classification prosodic_model(const Example& e) { return prosodic_decision(e).cls; }
Classification textual_model(const Example& e) { return textual_decision(e).cls; }
Classification majority_model(const Example& e) { return majority_decision(e).cls; }

BaselineReport run_baseline(BaselineDecision (*model)(const Example&), const Corpus& c) {
  if (c.examples.empty()) throw Error(Errc::EmptyCorpus, "baseline needs examples");
  BaselineReport r;
  r.n = c.size();
  for (const Example& e : c.examples) {
    if (!e.label) throw Error(Errc::MissingLabel, "baseline needs a labeled corpus");
    Example probe = e;
    probe.label.reset();
    probe.judges.reset();
    BaselineDecision d = model(probe);
    ++r.fired[d.line];
    if (d.cls != *e.label) {
      if (*e.label == Classification::Discourse)
        ++r.misclassified_discourse;
      else
        ++r.misclassified_sentential;
    }
  }
  r.error = static_cast<double>(r.misclassified_discourse + r.misclassified_sentential) /
            static_cast<double>(r.n);
  return r;
}

}  // namespace cuelearn
