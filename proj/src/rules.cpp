#include "cuelearn/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cuelearn/error.hpp"
#include "cuelearn/rng.hpp"

namespace cuelearn {

bool Condition::holds(const Example& e) const {
  const FeatureValue& v = e.at(feature);
  switch (op) {
    case CondOp::Eq:
      return v == value;
    case CondOp::Le:
      return !v.is_na() && v.num <= value.num;
    case CondOp::Ge:
      return !v.is_na() && v.num >= value.num;
  }
  return false;
}

bool Rule::covers(const Example& e) const {
  for (const Condition& c : conditions)
    if (!c.holds(e)) return false;
  return true;
}

double foil_gain(std::size_t p_before, std::size_t n_before, std::size_t p_after,
                 std::size_t n_after) {
  if (p_before + n_before == 0)
    throw Error(Errc::ZeroCoverageBefore, "refinement of an empty cover");
  if (p_after == 0) return 0.0;
  if (p_before == 0) return std::numeric_limits<double>::infinity();
  const double after = std::log2(static_cast<double>(p_after) /
                                 static_cast<double>(p_after + n_after));
  const double before = std::log2(static_cast<double>(p_before) /
                                  static_cast<double>(p_before + n_before));
  return static_cast<double>(p_after) * (after - before);
}

namespace {

Classification label_of(const Example& e) {
  if (!e.label) throw Error(Errc::MissingLabel, "rule induction needs labels");
  return *e.label;
}

struct Cover {
  std::size_t p = 0;  // target examples covered
  std::size_t n = 0;  // other examples covered
};

Cover cover_of(const std::vector<const Example*>& ex, const Rule& r,
               Classification target) {
  Cover c;
  for (const Example* e : ex) {
    if (!r.covers(*e)) continue;
    if (label_of(*e) == target)
      ++c.p;
    else
      ++c.n;
  }
  return c;
}

}  // namespace

Rule grow_rule(const Corpus& grow_set, Classification target, const FeatureSet& s,
               const RuleParams&) {
  if (s.members.empty()) throw Error(Errc::EmptyFeatureSet, "rule growth needs features");
  std::vector<FeatureId> feats = s.members;
  std::sort(feats.begin(), feats.end());
  feats.erase(std::unique(feats.begin(), feats.end()), feats.end());

  std::vector<const Example*> covered;
  covered.reserve(grow_set.size());
  for (const Example& e : grow_set.examples) covered.push_back(&e);

  Rule rule;
  rule.cls = target;
  Cover now = cover_of(covered, rule, target);
  if (now.p == 0) throw Error(Errc::NoTargetExamples, "grow set has no target examples");

  while (now.n > 0) {
    Condition best;
    double best_gain = 0.0;
    bool found = false;
    const auto consider = [&](const Condition& cand) {
      Cover after;
      for (const Example* e : covered) {
        if (!cand.holds(*e)) continue;
        if (label_of(*e) == target)
          ++after.p;
        else
          ++after.n;
      }
      const double g = foil_gain(now.p, now.n, after.p, after.n);
      if (g > best_gain) {
        best_gain = g;
        best = cand;
        found = true;
      }
    };
    for (FeatureId f : feats) {
      bool has_eq = false, has_le = false, has_ge = false;
      for (const Condition& c : rule.conditions) {
        if (c.feature != f) continue;
        if (c.op == CondOp::Eq) has_eq = true;
        if (c.op == CondOp::Le) has_le = true;
        if (c.op == CondOp::Ge) has_ge = true;
      }
      if (!is_numeric(f)) {
        if (has_eq) continue;
        for (const std::string& tag : vocabulary(f))
          consider({f, CondOp::Eq, FeatureValue::symbolic(tag)});
        if (na_allowed(f)) consider({f, CondOp::Eq, FeatureValue::na()});
        continue;
      }
      std::vector<int> values;
      for (const Example* e : covered) values.push_back(e->at(f).num);
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      if (!has_le)
        for (int v : values) consider({f, CondOp::Le, FeatureValue::numeric(v)});
      if (!has_ge)
        for (int v : values) consider({f, CondOp::Ge, FeatureValue::numeric(v)});
    }
    if (!found) break;
    rule.conditions.push_back(best);
    std::vector<const Example*> kept;
    for (const Example* e : covered)
      if (best.holds(*e)) kept.push_back(e);
    covered = std::move(kept);
    now = cover_of(covered, rule, target);
  }
  return rule;
}

Rule prune_rule(const Rule& r, const Corpus& prune_set) {
  if (r.conditions.empty() || prune_set.examples.empty()) return r;
  std::vector<const Example*> ex;
  ex.reserve(prune_set.size());
  for (const Example& e : prune_set.examples) ex.push_back(&e);

  double best_score = -std::numeric_limits<double>::infinity();
  std::size_t best_len = r.conditions.size();
  for (std::size_t len = r.conditions.size() + 1; len-- > 0;) {
    Rule prefix;
    prefix.cls = r.cls;
    prefix.conditions.assign(r.conditions.begin(), r.conditions.begin() + len);
    const Cover c = cover_of(ex, prefix, r.cls);
    const double score = c.p + c.n > 0
                             ? (static_cast<double>(c.p) - static_cast<double>(c.n)) /
                                   static_cast<double>(c.p + c.n)
                             : -1.0;
    if (score >= best_score) {  // >= so ties move to the shorter prefix
      best_score = score;
      best_len = len;
    }
  }
  Rule out;
  out.cls = r.cls;
  out.conditions.assign(r.conditions.begin(), r.conditions.begin() + best_len);
  return out;
}

RuleList learn_rules(const Corpus& c, const FeatureSet& s, const RuleParams& p) {
  if (c.examples.empty()) throw Error(Errc::EmptyCorpus, "rule induction needs examples");
  if (s.members.empty()) throw Error(Errc::EmptyFeatureSet, "rule induction needs features");
  if (!(p.grow_fraction > 0.0 && p.grow_fraction <= 1.0))
    throw Error(Errc::InvalidSpec, "grow_fraction must lie in (0,1]");

  std::size_t n_d = 0, n_s = 0;
  for (const Example& e : c.examples)
    (label_of(e) == Classification::Discourse ? n_d : n_s) += 1;
  if (n_d == 0 || n_s == 0)
    return RuleList{{}, n_d > 0 ? Classification::Discourse : Classification::Sentential};
  const Classification target =
      n_s > n_d ? Classification::Discourse
                : (n_d > n_s ? Classification::Sentential : Classification::Discourse);

  std::vector<const Example*> remaining;
  remaining.reserve(c.size());
  for (const Example& e : c.examples) remaining.push_back(&e);

  RuleList out;
  out.default_class = opposite(target);
  for (std::size_t rule_index = 0;; ++rule_index) {
    std::size_t remaining_targets = 0;
    for (const Example* e : remaining)
      if (label_of(*e) == target) ++remaining_targets;
    if (remaining_targets == 0) break;
    const double base_rate = static_cast<double>(remaining_targets) /
                             static_cast<double>(remaining.size());

    Rng rng = Rng::derive(p.seed, rule_index);
    std::vector<const Example*> order = remaining;
    rng.shuffle(order);
    std::size_t grow_n = static_cast<std::size_t>(
        std::ceil(p.grow_fraction * static_cast<double>(order.size()) - 1e-9));
    grow_n = std::min(std::max<std::size_t>(grow_n, 1), order.size());

    Corpus grow_set, prune_set;
    for (std::size_t i = 0; i < order.size(); ++i)
      (i < grow_n ? grow_set : prune_set).examples.push_back(*order[i]);

    std::size_t grow_targets = 0;
    for (const Example& e : grow_set.examples)
      if (label_of(e) == target) ++grow_targets;
    if (grow_targets == 0) break;

    Rule rule = grow_rule(grow_set, target, s, p);
    if (rule.conditions.empty()) break;
    if (p.prune) rule = prune_rule(rule, prune_set);
    if (rule.conditions.empty()) break;

    const Corpus& eval_set = prune_set.examples.empty() ? grow_set : prune_set;
    std::vector<const Example*> eval;
    for (const Example& e : eval_set.examples) eval.push_back(&e);
    const Cover on_eval = cover_of(eval, rule, target);
    const double precision =
        on_eval.p + on_eval.n > 0
            ? static_cast<double>(on_eval.p) / static_cast<double>(on_eval.p + on_eval.n)
            : 0.0;
    if (!(precision > base_rate)) break;

    std::size_t grow_covered = 0;
    for (const Example& e : grow_set.examples)
      if (label_of(e) == target && rule.covers(e)) ++grow_covered;
    if (grow_covered < p.min_coverage) break;

    out.rules.push_back(rule);
    std::vector<const Example*> kept;
    for (const Example* e : remaining)
      if (!rule.covers(*e)) kept.push_back(e);
    remaining = std::move(kept);
  }
  return out;
}

Classification classify_rules(const RuleList& rl, const Example& e) {
  return classify_rules_fired(rl, e).first;
}

std::pair<Classification, std::optional<std::size_t>> classify_rules_fired(
    const RuleList& rl, const Example& e) {
  for (std::size_t i = 0; i < rl.rules.size(); ++i)
    if (rl.rules[i].covers(e)) return {rl.rules[i].cls, i};
  return {rl.default_class, std::nullopt};
}

namespace {

std::string_view op_text(CondOp op) {
  switch (op) {
    case CondOp::Eq: return "=";
    case CondOp::Le: return "<=";
    default: return ">=";
  }
}

}  // namespace

std::string render_rules(const RuleList& rl) {
  std::string out;
  for (const Rule& r : rl.rules) {
    out += "if ";
    for (std::size_t i = 0; i < r.conditions.size(); ++i) {
      const Condition& c = r.conditions[i];
      if (i) out += " and ";
      out += std::string(header_name(c.feature)) + " " + std::string(op_text(c.op)) +
             " " + render_value(c.value);
    }
    out += " then ";
    out += class_name(r.cls);
    out += '\n';
  }
  out += "default is ";
  out += class_name(rl.default_class);
  out += '\n';
  return out;
}

namespace {

Condition parse_condition(const std::string& text, std::size_t line_no) {
  // Operator search order matters: " = " is a substring of neither bound
  // form, but " <= " and " >= " both contain "= ".
  CondOp op;
  std::size_t at = text.find(" <= ");
  std::size_t op_len = 4;
  if (at != std::string::npos) {
    op = CondOp::Le;
  } else if ((at = text.find(" >= ")) != std::string::npos) {
    op = CondOp::Ge;
  } else if ((at = text.find(" = ")) != std::string::npos) {
    op = CondOp::Eq;
    op_len = 3;
  } else {
    throw Error(Errc::Parse, "condition needs an operator", line_no);
  }
  const std::string name = text.substr(0, at);
  const std::string value = text.substr(at + op_len);
  if (name.empty() || value.empty() || name.find(' ') != std::string::npos ||
      value.find(' ') != std::string::npos)
    throw Error(Errc::Parse, "malformed condition '" + text + "'", line_no);
  try {
    const FeatureId f = feature_from_header(name);
    if (op == CondOp::Eq && is_numeric(f))
      throw Error(Errc::Parse, "equality test on a numeric feature", line_no);
    if (op != CondOp::Eq && !is_numeric(f))
      throw Error(Errc::Parse, "numeric comparison on a symbolic feature", line_no);
    return {f, op, parse_value(f, value)};
  } catch (const Error& err) {
    if (err.code() == Errc::Parse) throw;
    throw Error(Errc::Parse, err.detail(), line_no);
  }
}

}  // namespace

RuleList parse_rules(const std::string& text) {
  RuleList out;
  bool saw_default = false;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    std::string line = text.substr(pos, end == std::string::npos ? std::string::npos
                                                                 : end - pos);
    pos = end == std::string::npos ? text.size() : end + 1;
    ++line_no;
    if (line.empty()) {
      if (pos >= text.size()) break;
      throw Error(Errc::Parse, "empty line", line_no);
    }
    if (saw_default) throw Error(Errc::Parse, "content after the default line", line_no);
    if (line.rfind("default is ", 0) == 0) {
      const std::string cls = line.substr(11);
      try {
        out.default_class = class_from_name(cls);
      } catch (const Error& err) {
        throw Error(Errc::Parse, err.detail(), line_no);
      }
      saw_default = true;
      continue;
    }
    if (line.rfind("if ", 0) != 0)
      throw Error(Errc::Parse, "expected an if line or the default line", line_no);
    const std::size_t then_at = line.rfind(" then ");
    if (then_at == std::string::npos)
      throw Error(Errc::Parse, "rule needs 'then'", line_no);
    const std::string conds_text = line.substr(3, then_at - 3);
    const std::string cls_text = line.substr(then_at + 6);
    Rule r;
    try {
      r.cls = class_from_name(cls_text);
    } catch (const Error& err) {
      throw Error(Errc::Parse, err.detail(), line_no);
    }
    std::size_t cpos = 0;
    while (true) {
      std::size_t and_at = conds_text.find(" and ", cpos);
      const std::string one = conds_text.substr(
          cpos, and_at == std::string::npos ? std::string::npos : and_at - cpos);
      r.conditions.push_back(parse_condition(one, line_no));
      if (and_at == std::string::npos) break;
      cpos = and_at + 5;
    }
    if (r.conditions.empty())
      throw Error(Errc::Parse, "rule without conditions", line_no);
    if (!out.rules.empty() && r.cls != out.rules.front().cls)
      throw Error(Errc::Parse, "rules must all predict one class", line_no);
    out.rules.push_back(std::move(r));
  }
  if (!saw_default) throw Error(Errc::Parse, "missing default line", line_no ? line_no : 1);
  if (!out.rules.empty() && out.rules.front().cls == out.default_class)
    throw Error(Errc::Parse, "default must be the class the rules do not predict",
                line_no);
  return out;
}

}  // namespace cuelearn
