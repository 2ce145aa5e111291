#include "mtdt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "core/error.hpp"
#include "mtdt/objectives.hpp"

namespace tourkit::mtdt {

namespace {

constexpr double kMinGain = 1e-12;

// Rounds objective noise from summation order so that equal partitions
// compare equal under dominance.
double snap(double value, double scale) {
  const double q = 1e-10 * std::max(scale, 1.0);
  return std::round(value / q) * q;
}

void fill_statistics(Node& node, const TrainingSet& data, std::span<const std::size_t> rows) {
  node.count = rows.size();
  node.class_counts.assign(data.classes.size(), 0);
  for (const auto r : rows) ++node.class_counts[static_cast<std::size_t>(data.y_class[r])];
  node.distribution.assign(data.classes.size(), 0.0);
  if (!rows.empty()) {
    for (std::size_t c = 0; c < data.classes.size(); ++c) {
      node.distribution[c] =
          static_cast<double>(node.class_counts[c]) / static_cast<double>(rows.size());
    }
  }
  node.mean = 0.0;
  node.variance = 0.0;
  if (data.has_numeric && !rows.empty()) {
    for (const auto r : rows) node.mean += data.y_numeric[r];
    node.mean /= static_cast<double>(rows.size());
    for (const auto r : rows) {
      const double d = data.y_numeric[r] - node.mean;
      node.variance += d * d;
    }
    node.variance /= static_cast<double>(rows.size());
  }
}

struct Builder {
  const TrainingSet& data;
  const Hyperparams& params;
  std::vector<Node> nodes;  // depth-first during construction

  int build(std::vector<std::size_t> rows, std::vector<bool> used, int depth) {
    const int index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    {
      Node& node = nodes.back();
      node.depth = depth;
      fill_statistics(node, data, rows);
    }
    const Node snapshot = nodes.back();

    const bool pure = std::count_if(snapshot.class_counts.begin(), snapshot.class_counts.end(),
                                    [](std::size_t c) { return c > 0; }) <= 1 &&
                      snapshot.variance == 0.0;
    if (pure || depth >= params.max_depth) return index;

    const double total_ss = node_sum_of_squares(data, rows);
    std::vector<SplitCandidate> candidates;
    for (std::size_t a = 0; a < data.attributes.size(); ++a) {
      if (used[a]) continue;
      const auto obj = split_objectives(data, rows, a);
      if (!obj) continue;
      if (obj->smallest_child < static_cast<std::size_t>(std::max(1, params.min_samples_leaf))) {
        continue;
      }
      SplitCandidate c;
      c.attribute = a;
      c.name = data.attributes[a].name;
      c.ssr = snap(obj->ssr, total_ss);
      c.ig = snap(obj->ig, 1.0);
      candidates.push_back(std::move(c));
    }
    if (candidates.empty()) return index;

    rank_candidates(candidates);
    normalize_objectives(candidates);
    const auto& best = candidates[select_split(candidates, params.secondary_mode)];
    // SSR was snapped, so compare the reduction against the snapping grid.
    const double ss_floor = std::max(kMinGain, 1e-9 * total_ss);
    if (best.ig <= kMinGain && total_ss - best.ssr <= ss_floor) return index;

    const std::size_t attr = best.attribute;
    std::vector<CandidateRecord> records;
    for (const auto& c : candidates) records.push_back({c.name, c.ssr, c.ig, c.rank});

    const std::size_t levels = data.attributes[attr].levels.size();
    std::vector<std::vector<std::size_t>> parts(levels);
    for (const auto r : rows) parts[static_cast<std::size_t>(data.x[r][attr])].push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    used[attr] = true;
    std::vector<int> children(levels, -1);
    int fallback = -1;
    std::size_t fallback_count = 0;
    for (std::size_t l = 0; l < levels; ++l) {
      if (parts[l].empty()) continue;
      const std::size_t count = parts[l].size();
      children[l] = build(std::move(parts[l]), used, depth + 1);
      if (fallback < 0 || count > fallback_count) {
        fallback = children[l];
        fallback_count = count;
      }
    }
    Node& node = nodes[static_cast<std::size_t>(index)];
    node.attribute = static_cast<int>(attr);
    node.children = std::move(children);
    node.fallback = fallback;
    node.candidates = std::move(records);
    return index;
  }
};

// Renumbers nodes breadth-first so ids read top-down like a drawn tree.
std::vector<Node> breadth_first(std::vector<Node> nodes) {
  if (nodes.empty()) return nodes;
  std::vector<int> order;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    order.push_back(i);
    for (const int c : nodes[static_cast<std::size_t>(i)].children) {
      if (c >= 0) queue.push_back(c);
    }
  }
  std::vector<int> new_index(nodes.size(), -1);
  for (std::size_t k = 0; k < order.size(); ++k) new_index[static_cast<std::size_t>(order[k])] = static_cast<int>(k);
  std::vector<Node> out;
  out.reserve(order.size());
  for (const int i : order) {
    Node n = std::move(nodes[static_cast<std::size_t>(i)]);
    for (auto& c : n.children) {
      if (c >= 0) c = new_index[static_cast<std::size_t>(c)];
    }
    if (n.fallback >= 0) n.fallback = new_index[static_cast<std::size_t>(n.fallback)];
    n.id = static_cast<int>(out.size()) + 1;
    out.push_back(std::move(n));
  }
  return out;
}

}  // namespace

std::size_t MultiTaskTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.is_leaf(); }));
}

int MultiTaskTree::depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

MultiTaskTree grow_tree(const TrainingSet& data, const Hyperparams& params) {
  data.validate();
  if (data.size() == 0) fail(ErrorCode::domain, "grow_tree: empty training set");
  if (params.max_depth < 0) fail(ErrorCode::invalid_argument, "grow_tree: negative max_depth");

  MultiTaskTree tree;
  tree.attributes = data.attributes;
  tree.classes = data.classes;
  tree.class_target = data.class_target;
  tree.numeric_target = data.numeric_target;
  tree.has_numeric = data.has_numeric;

  Builder builder{data, params, {}};
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  builder.build(std::move(rows), std::vector<bool>(data.attributes.size(), false), 0);
  tree.nodes = breadth_first(std::move(builder.nodes));
  return tree;
}

Prediction predict(const MultiTaskTree& tree, std::span<const int> levels) {
  if (tree.nodes.empty()) fail(ErrorCode::domain, "predict: empty tree");
  std::size_t i = 0;
  while (!tree.nodes[i].is_leaf()) {
    const Node& n = tree.nodes[i];
    const auto attr = static_cast<std::size_t>(n.attribute);
    int next = n.fallback;
    if (attr < levels.size()) {
      const int level = levels[attr];
      if (level >= 0 && static_cast<std::size_t>(level) < n.children.size() &&
          n.children[static_cast<std::size_t>(level)] >= 0) {
        next = n.children[static_cast<std::size_t>(level)];
      }
    }
    i = static_cast<std::size_t>(next);
  }
  const Node& leaf = tree.nodes[i];
  Prediction p;
  p.distribution = leaf.distribution;
  p.predicted_class = static_cast<int>(
      std::max_element(leaf.distribution.begin(), leaf.distribution.end()) -
      leaf.distribution.begin());
  p.numeric = leaf.mean;
  p.leaf = i;
  p.leaf_id = leaf.id;
  return p;
}

std::vector<std::size_t> assign_leaves(const MultiTaskTree& tree, const TrainingSet& data) {
  std::vector<std::size_t> out(data.size());
  for (std::size_t r = 0; r < data.size(); ++r) out[r] = predict(tree, data.x[r]).leaf;
  return out;
}

}  // namespace tourkit::mtdt
