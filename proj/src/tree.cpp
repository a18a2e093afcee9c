#include "cuelearn/tree.hpp"

#include <algorithm>
#include <cmath>

#include "cuelearn/error.hpp"

namespace cuelearn {

double entropy(std::size_t n_discourse, std::size_t n_sentential) {
  const std::size_t n = n_discourse + n_sentential;
  if (n == 0) throw Error(Errc::EmptyDistribution, "entropy of zero examples");
  if (n_discourse == 0 || n_sentential == 0) return 0.0;
  const double pd = static_cast<double>(n_discourse) / static_cast<double>(n);
  const double ps = static_cast<double>(n_sentential) / static_cast<double>(n);
  return -(pd * std::log2(pd) + ps * std::log2(ps));
}

double info_gain(std::size_t n_discourse, std::size_t n_sentential,
                 const std::vector<std::pair<std::size_t, std::size_t>>& children) {
  const std::size_t n = n_discourse + n_sentential;
  if (n == 0) throw Error(Errc::EmptyDistribution, "gain over zero examples");
  std::size_t cd = 0, cs = 0;
  for (const auto& [d, s] : children) {
    cd += d;
    cs += s;
  }
  if (cd != n_discourse || cs != n_sentential)
    throw Error(Errc::PartitionMismatch, "child counts do not sum to the parent");
  double remainder = 0.0;
  for (const auto& [d, s] : children) {
    const std::size_t cn = d + s;
    if (cn == 0) continue;
    remainder += static_cast<double>(cn) / static_cast<double>(n) * entropy(d, s);
  }
  return entropy(n_discourse, n_sentential) - remainder;
}

double pessimistic_upper(std::size_t errors, std::size_t n, double confidence) {
  if (n == 0) throw Error(Errc::EmptyDistribution, "error bound of zero trials");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw Error(Errc::InvalidSpec, "confidence must lie in (0,1)");
  if (errors >= n) return 1.0;
  // CDF(errors; n, p) falls monotonically from 1 to 0 as p runs over (0,1);
  // bisect for the largest p still reaching the confidence level.
  const auto cdf = [&](double p) {
    double sum = 0.0;
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    for (std::size_t i = 0; i <= errors; ++i) {
      const double lc = std::lgamma(static_cast<double>(n) + 1.0) -
                        std::lgamma(static_cast<double>(i) + 1.0) -
                        std::lgamma(static_cast<double>(n - i) + 1.0);
      sum += std::exp(lc + static_cast<double>(i) * lp +
                      static_cast<double>(n - i) * lq);
    }
    return sum;
  };
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= confidence)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

namespace {

struct Counts {
  std::size_t d = 0;
  std::size_t s = 0;
  std::size_t total() const { return d + s; }
};

Counts count_labels(const std::vector<const Example*>& ex) {
  Counts c;
  for (const Example* e : ex) {
    if (!e->label) throw Error(Errc::MissingLabel, "tree induction needs labels");
    if (*e->label == Classification::Discourse)
      ++c.d;
    else
      ++c.s;
  }
  return c;
}

Classification majority_of(const Counts& c) {
  return c.s > c.d ? Classification::Sentential : Classification::Discourse;
}

TreePtr make_leaf(const Counts& c) {
  auto node = std::make_unique<TreeNode>();
  node->kind = TreeNode::Kind::Leaf;
  node->n_discourse = c.d;
  node->n_sentential = c.s;
  node->leaf_class = majority_of(c);
  return node;
}

struct Candidate {
  bool valid = false;
  double gain = -1.0;
  FeatureId feature{};
  bool numeric = false;
  int threshold = 0;
  std::vector<FeatureValue> values;  // observed symbolic values, canonical order
};

// Observed symbolic values at a node, vocabulary order with NA last, paired
// with their class counts.
std::vector<std::pair<FeatureValue, Counts>> symbolic_groups(
    const std::vector<const Example*>& ex, FeatureId f) {
  const auto& vocab = vocabulary(f);
  std::vector<Counts> per_value(vocab.size() + 1);
  for (const Example* e : ex) {
    const FeatureValue& v = e->at(f);
    std::size_t slot;
    if (v.is_na()) {
      slot = vocab.size();
    } else {
      slot = static_cast<std::size_t>(
          std::find(vocab.begin(), vocab.end(), v.tag) - vocab.begin());
    }
    if (*e->label == Classification::Discourse)
      ++per_value[slot].d;
    else
      ++per_value[slot].s;
  }
  std::vector<std::pair<FeatureValue, Counts>> groups;
  for (std::size_t i = 0; i < vocab.size(); ++i)
    if (per_value[i].total() > 0)
      groups.emplace_back(FeatureValue::symbolic(vocab[i]), per_value[i]);
  if (per_value[vocab.size()].total() > 0)
    groups.emplace_back(FeatureValue::na(), per_value[vocab.size()]);
  return groups;
}

TreePtr grow_node(const std::vector<const Example*>& ex,
                  const std::vector<FeatureId>& feats, const TreeParams& p) {
  const Counts c = count_labels(ex);
  if (c.d == 0 || c.s == 0 || ex.size() < 2 * p.min_leaf) return make_leaf(c);

  Candidate best;
  for (FeatureId f : feats) {
    if (is_numeric(f)) {
      // Distinct values ascending with cumulative counts; thresholds are all
      // observed values except the largest.
      std::vector<std::pair<int, Counts>> dist;
      for (const Example* e : ex) {
        const int v = e->at(f).num;
        auto it = std::lower_bound(
            dist.begin(), dist.end(), v,
            [](const auto& a, int b) { return a.first < b; });
        if (it == dist.end() || it->first != v) it = dist.insert(it, {v, {}});
        if (*e->label == Classification::Discourse)
          ++it->second.d;
        else
          ++it->second.s;
      }
      if (dist.size() < 2) continue;
      Counts le;
      for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
        le.d += dist[i].second.d;
        le.s += dist[i].second.s;
        const Counts gt{c.d - le.d, c.s - le.s};
        const double g = info_gain(c.d, c.s, {{le.d, le.s}, {gt.d, gt.s}});
        if (g > best.gain) {
          best = {true, g, f, true, dist[i].first, {}};
        }
      }
    } else {
      auto groups = symbolic_groups(ex, f);
      if (groups.size() < 2) continue;
      std::vector<std::pair<std::size_t, std::size_t>> child_counts;
      for (const auto& [value, counts] : groups)
        child_counts.emplace_back(counts.d, counts.s);
      const double g = info_gain(c.d, c.s, child_counts);
      if (g > best.gain) {
        best.valid = true;
        best.gain = g;
        best.feature = f;
        best.numeric = false;
        best.values.clear();
        for (auto& [value, counts] : groups) best.values.push_back(value);
      }
    }
  }
  if (!best.valid) return make_leaf(c);

  auto node = std::make_unique<TreeNode>();
  node->n_discourse = c.d;
  node->n_sentential = c.s;
  node->leaf_class = majority_of(c);
  node->feature = best.feature;
  if (best.numeric) {
    node->kind = TreeNode::Kind::NumericTest;
    node->threshold = best.threshold;
    std::vector<const Example*> le, gt;
    for (const Example* e : ex)
      (e->at(best.feature).num <= best.threshold ? le : gt).push_back(e);
    node->le_child = grow_node(le, feats, p);
    node->gt_child = grow_node(gt, feats, p);
  } else {
    node->kind = TreeNode::Kind::SymbolicTest;
    node->absent_class = majority_of(c);
    for (const FeatureValue& v : best.values) {
      std::vector<const Example*> sub;
      for (const Example* e : ex)
        if (e->at(best.feature) == v) sub.push_back(e);
      node->branches.emplace_back(v, grow_node(sub, feats, p));
    }
  }
  return node;
}

// The pruning objective of this node if it were collapsed to a leaf.
double bound_as_leaf(const TreeNode& n, double confidence) {
  const std::size_t total = n.n_discourse + n.n_sentential;
  if (total == 0) return 0.0;
  const std::size_t wrong = std::min(n.n_discourse, n.n_sentential);
  return static_cast<double>(total) * pessimistic_upper(wrong, total, confidence);
}

void prune_node(TreeNode& n, double confidence) {
  if (n.kind == TreeNode::Kind::Leaf) return;
  if (n.kind == TreeNode::Kind::NumericTest) {
    prune_node(*n.le_child, confidence);
    prune_node(*n.gt_child, confidence);
  } else {
    for (auto& [value, child] : n.branches) prune_node(*child, confidence);
  }
  const double as_subtree = estimated_errors(n, confidence);
  const double as_leaf = bound_as_leaf(n, confidence);
  if (as_leaf <= as_subtree + 1e-12) {
    const Counts c{n.n_discourse, n.n_sentential};
    n.kind = TreeNode::Kind::Leaf;
    n.leaf_class = majority_of(c);
    n.le_child.reset();
    n.gt_child.reset();
    n.branches.clear();
  }
}

}  // namespace

TreePtr grow(const Corpus& c, const FeatureSet& s, const TreeParams& p) {
  if (c.examples.empty()) throw Error(Errc::EmptyCorpus, "tree induction needs examples");
  if (s.members.empty()) throw Error(Errc::EmptyFeatureSet, "tree induction needs features");
  std::vector<FeatureId> feats = s.members;
  std::sort(feats.begin(), feats.end());
  feats.erase(std::unique(feats.begin(), feats.end()), feats.end());
  std::vector<const Example*> ex;
  ex.reserve(c.size());
  for (const Example& e : c.examples) ex.push_back(&e);
  return grow_node(ex, feats, p);
}

TreePtr prune(TreePtr t, const TreeParams& p) {
  prune_node(*t, p.confidence);
  return t;
}

TreePtr induce_tree(const Corpus& c, const FeatureSet& s, const TreeParams& p) {
  TreePtr t = grow(c, s, p);
  if (p.prune) t = prune(std::move(t), p);
  return t;
}

Classification classify_tree(const TreeNode& t, const Example& e) {
  switch (t.kind) {
    case TreeNode::Kind::Leaf:
      return t.leaf_class;
    case TreeNode::Kind::NumericTest:
      return e.at(t.feature).num <= t.threshold ? classify_tree(*t.le_child, e)
                                                : classify_tree(*t.gt_child, e);
    case TreeNode::Kind::SymbolicTest: {
      const FeatureValue& v = e.at(t.feature);
      for (const auto& [value, child] : t.branches)
        if (value == v) return classify_tree(*child, e);
      return t.absent_class;
    }
  }
  return t.leaf_class;
}

TreePtr clone_tree(const TreeNode& t) {
  auto node = std::make_unique<TreeNode>();
  node->kind = t.kind;
  node->n_discourse = t.n_discourse;
  node->n_sentential = t.n_sentential;
  node->leaf_class = t.leaf_class;
  node->feature = t.feature;
  node->threshold = t.threshold;
  node->absent_class = t.absent_class;
  if (t.le_child) node->le_child = clone_tree(*t.le_child);
  if (t.gt_child) node->gt_child = clone_tree(*t.gt_child);
  for (const auto& [value, child] : t.branches)
    node->branches.emplace_back(value, clone_tree(*child));
  return node;
}

std::size_t count_nodes(const TreeNode& t) {
  std::size_t n = 1;
  if (t.le_child) n += count_nodes(*t.le_child);
  if (t.gt_child) n += count_nodes(*t.gt_child);
  for (const auto& [value, child] : t.branches) n += count_nodes(*child);
  return n;
}

std::size_t count_leaves(const TreeNode& t) {
  if (t.kind == TreeNode::Kind::Leaf) return 1;
  std::size_t n = 0;
  if (t.le_child) n += count_leaves(*t.le_child);
  if (t.gt_child) n += count_leaves(*t.gt_child);
  for (const auto& [value, child] : t.branches) n += count_leaves(*child);
  return n;
}

double estimated_errors(const TreeNode& t, double confidence) {
  if (t.kind == TreeNode::Kind::Leaf) {
    const std::size_t total = t.n_discourse + t.n_sentential;
    if (total == 0) return 0.0;
    const std::size_t wrong = t.leaf_class == Classification::Discourse
                                  ? t.n_sentential
                                  : t.n_discourse;
    return static_cast<double>(total) * pessimistic_upper(wrong, total, confidence);
  }
  double sum = 0.0;
  if (t.le_child) sum += estimated_errors(*t.le_child, confidence);
  if (t.gt_child) sum += estimated_errors(*t.gt_child, confidence);
  for (const auto& [value, child] : t.branches)
    sum += estimated_errors(*child, confidence);
  return sum;
}

std::size_t training_errors(const TreeNode& t) {
  if (t.kind == TreeNode::Kind::Leaf)
    return t.leaf_class == Classification::Discourse ? t.n_sentential : t.n_discourse;
  std::size_t sum = 0;
  if (t.le_child) sum += training_errors(*t.le_child);
  if (t.gt_child) sum += training_errors(*t.gt_child);
  for (const auto& [value, child] : t.branches) sum += training_errors(*child);
  return sum;
}

namespace {

void render_node(const TreeNode& n, std::size_t depth, std::string& out);

void render_child(const TreeNode& child, std::size_t depth, std::string& out) {
  if (child.kind == TreeNode::Kind::Leaf) {
    out += ' ';
    out += class_name(child.leaf_class);
    out += '\n';
  } else {
    out += '\n';
    render_node(child, depth + 1, out);
  }
}

void render_node(const TreeNode& n, std::size_t depth, std::string& out) {
  const std::string indent(depth * 2, ' ');
  const std::string name(header_name(n.feature));
  if (n.kind == TreeNode::Kind::NumericTest) {
    out += indent + "if " + name + " <= " + std::to_string(n.threshold) + " then";
    render_child(*n.le_child, depth, out);
    out += indent + "elseif " + name + " > " + std::to_string(n.threshold) + " then";
    render_child(*n.gt_child, depth, out);
  } else {
    for (std::size_t i = 0; i < n.branches.size(); ++i) {
      out += indent + (i == 0 ? "if " : "elseif ") + name + " = " +
             render_value(n.branches[i].first) + " then";
      render_child(*n.branches[i].second, depth, out);
    }
    out += indent + "else ";
    out += class_name(n.absent_class);
    out += '\n';
  }
}

}  // namespace

std::string render_tree(const TreeNode& t) {
  if (t.kind == TreeNode::Kind::Leaf)
    return "class: " + std::string(class_name(t.leaf_class)) + "\n";
  std::string out;
  render_node(t, 0, out);
  return out;
}

namespace {

struct TextLine {
  std::size_t depth = 0;
  std::vector<std::string> tokens;
  std::size_t number = 0;
};

std::vector<TextLine> tree_lines(const std::string& text) {
  std::vector<TextLine> lines;
  std::size_t pos = 0;
  std::size_t number = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    std::string raw = text.substr(pos, end == std::string::npos ? std::string::npos
                                                                : end - pos);
    pos = end == std::string::npos ? text.size() : end + 1;
    ++number;
    if (raw.empty()) {
      if (pos >= text.size()) break;
      throw Error(Errc::Parse, "empty line", number);
    }
    std::size_t spaces = 0;
    while (spaces < raw.size() && raw[spaces] == ' ') ++spaces;
    if (spaces % 2 != 0) throw Error(Errc::Parse, "odd indentation", number);
    TextLine line;
    line.depth = spaces / 2;
    line.number = number;
    std::size_t tpos = spaces;
    while (tpos < raw.size()) {
      std::size_t space = raw.find(' ', tpos);
      if (space == std::string::npos) space = raw.size();
      if (space == tpos) throw Error(Errc::Parse, "doubled space", number);
      line.tokens.push_back(raw.substr(tpos, space - tpos));
      tpos = space + 1;
    }
    if (line.tokens.empty()) throw Error(Errc::Parse, "blank line", number);
    lines.push_back(std::move(line));
  }
  return lines;
}

class TreeParser {
 public:
  explicit TreeParser(std::vector<TextLine> lines) : lines_(std::move(lines)) {}

  TreePtr parse() {
    if (lines_.empty()) throw Error(Errc::Parse, "empty model text", 1);
    if (lines_.size() == 1 && lines_[0].tokens.size() == 2 &&
        lines_[0].tokens[0] == "class:") {
      auto leaf = std::make_unique<TreeNode>();
      leaf->kind = TreeNode::Kind::Leaf;
      leaf->leaf_class = parse_class(lines_[0].tokens[1], lines_[0].number);
      return leaf;
    }
    TreePtr root = parse_node(0);
    if (pos_ != lines_.size())
      throw Error(Errc::Parse, "trailing content", lines_[pos_].number);
    return root;
  }

 private:
  const TextLine& need_line(std::size_t depth) {
    if (pos_ >= lines_.size())
      throw Error(Errc::Parse, "unexpected end of model text",
                  lines_.empty() ? 1 : lines_.back().number);
    const TextLine& line = lines_[pos_];
    if (line.depth != depth)
      throw Error(Errc::Parse, "bad indentation", line.number);
    return line;
  }

  static Classification parse_class(const std::string& token, std::size_t number) {
    try {
      return class_from_name(token);
    } catch (const Error& err) {
      throw Error(Errc::Parse, err.detail(), number);
    }
  }

  // Consumes the branch body after "then": an inline class or an indented
  // subtree on the following lines. The driving line is already consumed.
  TreePtr parse_body(const TextLine& line, std::size_t depth) {
    if (line.tokens.size() == 6) {
      auto leaf = std::make_unique<TreeNode>();
      leaf->kind = TreeNode::Kind::Leaf;
      leaf->leaf_class = parse_class(line.tokens[5], line.number);
      return leaf;
    }
    return parse_node(depth + 1);
  }

  TreePtr parse_node(std::size_t depth) {
    const TextLine line = need_line(depth);
    if (line.tokens[0] != "if")
      throw Error(Errc::Parse, "expected an if line", line.number);
    check_test_shape(line);
    const FeatureId f = parse_feature(line.tokens[1], line.number);
    const std::string& op = line.tokens[2];
    auto node = std::make_unique<TreeNode>();
    node->feature = f;
    if (op == "<=") {
      if (!is_numeric(f))
        throw Error(Errc::Parse, "numeric comparison on a symbolic feature",
                    line.number);
      node->kind = TreeNode::Kind::NumericTest;
      node->threshold = parse_threshold(f, line.tokens[3], line.number);
      ++pos_;
      node->le_child = parse_body(line, depth);
      const TextLine gt = need_line(depth);
      check_test_shape(gt);
      if (gt.tokens[0] != "elseif" || gt.tokens[1] != line.tokens[1] ||
          gt.tokens[2] != ">" || gt.tokens[3] != line.tokens[3])
        throw Error(Errc::Parse, "numeric test needs a matching > line", gt.number);
      ++pos_;
      node->gt_child = parse_body(gt, depth);
      return node;
    }
    if (op != "=")
      throw Error(Errc::Parse, "unknown operator '" + op + "'", line.number);
    if (is_numeric(f))
      throw Error(Errc::Parse, "equality test on a numeric feature", line.number);
    node->kind = TreeNode::Kind::SymbolicTest;
    bool first = true;
    while (true) {
      const TextLine branch = need_line(depth);
      if (!first) {
        if (branch.tokens[0] == "else") {
          if (branch.tokens.size() != 2)
            throw Error(Errc::Parse, "malformed else line", branch.number);
          node->absent_class = parse_class(branch.tokens[1], branch.number);
          ++pos_;
          return node;
        }
        if (branch.tokens[0] != "elseif") break;
        check_test_shape(branch);
        if (branch.tokens[1] != line.tokens[1] || branch.tokens[2] != "=")
          throw Error(Errc::Parse, "branch tests a different feature", branch.number);
      }
      FeatureValue v = parse_branch_value(f, branch.tokens[3], branch.number);
      for (const auto& [existing, child] : node->branches)
        if (existing == v)
          throw Error(Errc::Parse, "duplicate branch value", branch.number);
      ++pos_;
      TreePtr child = parse_body(branch, depth);
      node->branches.emplace_back(std::move(v), std::move(child));
      first = false;
    }
    throw Error(Errc::Parse, "symbolic test needs a closing else line",
                pos_ < lines_.size() ? lines_[pos_].number : lines_.back().number);
  }

  void check_test_shape(const TextLine& line) {
    if (line.tokens.size() != 5 && line.tokens.size() != 6)
      throw Error(Errc::Parse, "malformed test line", line.number);
    if (line.tokens[4] != "then")
      throw Error(Errc::Parse, "expected 'then'", line.number);
  }

  static FeatureId parse_feature(const std::string& token, std::size_t number) {
    try {
      return feature_from_header(token);
    } catch (const Error& err) {
      throw Error(Errc::Parse, err.detail(), number);
    }
  }

  static int parse_threshold(FeatureId f, const std::string& token,
                             std::size_t number) {
    try {
      return parse_value(f, token).num;
    } catch (const Error& err) {
      throw Error(Errc::Parse, err.detail(), number);
    }
  }

  static FeatureValue parse_branch_value(FeatureId f, const std::string& token,
                                         std::size_t number) {
    try {
      return parse_value(f, token);
    } catch (const Error& err) {
      throw Error(Errc::Parse, err.detail(), number);
    }
  }

  std::vector<TextLine> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

TreePtr parse_tree(const std::string& text) {
  return TreeParser(tree_lines(text)).parse();
}

}  // namespace cuelearn
