#include "cuelearn/evaluator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "cuelearn/error.hpp"
#include "cuelearn/rng.hpp"

namespace cuelearn {

EvalResult error_rate(const Model& m, const Corpus& c) {
  if (c.examples.empty()) throw Error(Errc::EmptyCorpus, "evaluation needs examples");
  EvalResult r;
  r.n = c.size();
  for (const Example& e : c.examples) {
    if (!e.label) throw Error(Errc::MissingLabel, "evaluation needs a labeled corpus");
    Example probe = e;
    probe.label.reset();
    probe.judges.reset();
    const Classification predicted = m(probe);
    if (predicted == *e.label) continue;
    if (*e.label == Classification::Discourse)
      ++r.misclassified_discourse;
    else
      ++r.misclassified_sentential;
  }
  r.error = static_cast<double>(r.misclassified_discourse + r.misclassified_sentential) /
            static_cast<double>(r.n);
  return r;
}

CvRow cross_validate(const Corpus& c, const Fit& fit, const FeatureSet& s,
                     const std::string& learner_name, std::size_t runs,
                     double train_fraction, std::uint64_t seed) {
  if (runs < 1) throw Error(Errc::InvalidSpec, "runs must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(Errc::InvalidSpec, "train_fraction must lie in (0,1)");
  if (c.examples.empty()) throw Error(Errc::EmptyCorpus, "cross-validation needs examples");
  const std::size_t n = c.size();
  std::size_t train_n = static_cast<std::size_t>(
      std::ceil(train_fraction * static_cast<double>(n) - 1e-9));
  train_n = std::min(std::max<std::size_t>(train_n, 1), n);
  if (train_n >= n)
    throw Error(Errc::TooFewExamples, "no examples left for the test side");

  CvRow row;
  row.set_name = s.name;
  row.learner_name = learner_name;
  row.per_run_errors.reserve(runs);
  for (std::size_t run = 0; run < runs; ++run) {
    Rng shuffle_rng = Rng::derive(seed, 2 * run);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    shuffle_rng.shuffle(idx);

    Corpus train;
    train.examples.reserve(train_n);
    for (std::size_t i = 0; i < train_n; ++i)
      train.examples.push_back(project(c.examples[idx[i]], s));
    const Model model = fit(train, s, Rng::mix(seed, 2 * run + 1));

    std::size_t wrong = 0;
    for (std::size_t i = train_n; i < n; ++i) {
      const Example& gold_ex = c.examples[idx[i]];
      if (!gold_ex.label)
        throw Error(Errc::MissingLabel, "cross-validation needs a labeled corpus");
      Example probe = project(gold_ex, s);
      probe.label.reset();
      probe.judges.reset();
      if (model(probe) != *gold_ex.label) ++wrong;
    }
    row.per_run_errors.push_back(static_cast<double>(wrong) /
                                 static_cast<double>(n - train_n));
  }

  double mean = 0.0;
  for (double e : row.per_run_errors) mean += e;
  mean /= static_cast<double>(runs);
  double var = 0.0;
  if (runs > 1) {
    for (double e : row.per_run_errors) var += (e - mean) * (e - mean);
    var /= static_cast<double>(runs - 1);
  }
  row.mean_error_percent = 100.0 * mean;
  row.stderr_percent = 100.0 * std::sqrt(var / static_cast<double>(runs));
  return row;
}

namespace {

std::size_t catalog_position(const std::string& name) {
  const auto& sets = catalog();
  for (std::size_t i = 0; i < sets.size(); ++i)
    if (sets[i].name == name) return i;
  return sets.size();
}

std::vector<const CvRow*> ordered_rows(const CvReport& report) {
  std::vector<const CvRow*> rows;
  rows.reserve(report.rows.size());
  for (const CvRow& r : report.rows) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(), [](const CvRow* a, const CvRow* b) {
    const std::size_t pa = catalog_position(a->set_name);
    const std::size_t pb = catalog_position(b->set_name);
    if (pa != pb) return pa < pb;
    if (a->set_name != b->set_name) return a->set_name < b->set_name;
    return a->learner_name < b->learner_name;
  });
  return rows;
}

// Shortest decimal form that parses back to the same double.
std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

std::string render_report(const CvReport& report) {
  const std::vector<const CvRow*> rows = ordered_rows(report);
  std::size_t set_w = 3, learner_w = 7;
  for (const CvRow* r : rows) {
    set_w = std::max(set_w, r->set_name.size());
    learner_w = std::max(learner_w, r->learner_name.size());
  }
  const auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  const auto lead = [](const std::string& s, std::size_t w) {
    return std::string(w - s.size(), ' ') + s;
  };
  std::string out = pad("Set", set_w) + "  " + pad("Learner", learner_w) +
                    "  Mean%  Stderr%\n";
  for (const CvRow* r : rows) {
    char mean_buf[32], se_buf[32];
    std::snprintf(mean_buf, sizeof mean_buf, "%ld",
                  std::lround(r->mean_error_percent));
    std::snprintf(se_buf, sizeof se_buf, "%.1f", r->stderr_percent);
    out += pad(r->set_name, set_w) + "  " + pad(r->learner_name, learner_w) + "  " +
           lead(mean_buf, 5) + "  " + lead(se_buf, 7) + "\n";
  }
  return out;
}

std::string report_records(const CvReport& report) {
  std::string out;
  for (const CvRow* r : ordered_rows(report)) {
    out += "{\"set\":" + json_string(r->set_name) +
           ",\"learner\":" + json_string(r->learner_name) +
           ",\"mean_error\":" + shortest(r->mean_error_percent) +
           ",\"stderr\":" + shortest(r->stderr_percent) + ",\"runs\":[";
    for (std::size_t i = 0; i < r->per_run_errors.size(); ++i) {
      if (i) out += ',';
      out += shortest(r->per_run_errors[i]);
    }
    out += "]}\n";
  }
  return out;
}

}  // namespace cuelearn
