#pragma once

// Slow reference implementations used as test oracles. Nothing here calls
// into the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// ---- association rules -----------------------------------------------------

struct BruteRule {
  std::vector<std::string> a, b;
  long long count = 0;
  double support = 0, confidence = 0, lift = 0;
};

// Enumerates every itemset over the item universe with bit masks, then every
// split of each frequent itemset into antecedent and consequent.
inline std::vector<BruteRule> brute_rules(const std::vector<std::vector<std::string>>& tx,
                                          double min_support, double min_confidence,
                                          std::size_t min_rule_size) {
  std::set<std::string> universe;
  for (const auto& t : tx)
    for (const auto& i : t) universe.insert(i);
  const std::vector<std::string> items(universe.begin(), universe.end());
  const std::size_t m = items.size();
  std::vector<std::uint32_t> masks;
  for (const auto& t : tx) {
    std::uint32_t mask = 0;
    for (const auto& i : t)
      mask |= 1u << (std::lower_bound(items.begin(), items.end(), i) - items.begin());
    masks.push_back(mask);
  }
  const double n = static_cast<double>(tx.size());
  auto count = [&](std::uint32_t s) {
    long long c = 0;
    for (auto t : masks)
      if ((t & s) == s) ++c;
    return c;
  };
  auto names = [&](std::uint32_t s) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < m; ++i)
      if (s >> i & 1u) out.push_back(items[i]);
    return out;
  };
  std::vector<BruteRule> rules;
  for (std::uint32_t s = 1; s < (1u << m); ++s) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(s));
    if (size < std::max<std::size_t>(2, min_rule_size)) continue;
    const long long cs = count(s);
    if (static_cast<double>(cs) / n < min_support) continue;
    for (std::uint32_t a = (s - 1) & s; a > 0; a = (a - 1) & s) {
      const std::uint32_t b = s & ~a;
      const long long ca = count(a), cb = count(b);
      const double conf = static_cast<double>(cs) / static_cast<double>(ca);
      if (conf < min_confidence) continue;
      BruteRule r;
      r.a = names(a);
      r.b = names(b);
      r.count = cs;
      r.support = static_cast<double>(cs) / n;
      r.confidence = conf;
      r.lift = (static_cast<double>(cs) / n) /
               ((static_cast<double>(ca) / n) * (static_cast<double>(cb) / n));
      rules.push_back(std::move(r));
    }
  }
  return rules;
}

// Connected components by repeated graph search.
inline std::vector<std::set<std::string>> components(
    const std::set<std::string>& nodes, const std::vector<std::vector<std::string>>& cliques) {
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& n : nodes) adj[n];
  for (const auto& c : cliques)
    for (const auto& x : c)
      for (const auto& y : c) adj[x].insert(y);
  std::set<std::string> seen;
  std::vector<std::set<std::string>> out;
  for (const auto& [start, _] : adj) {
    if (seen.count(start)) continue;
    std::set<std::string> comp;
    std::vector<std::string> stack{start};
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      if (!seen.insert(v).second) continue;
      comp.insert(v);
      for (const auto& w : adj[v]) stack.push_back(w);
    }
    out.push_back(comp);
  }
  return out;
}

// ---- non-dominated ranking -------------------------------------------------

// Points are (f1, f2), both minimized. Peels fronts by pairwise checks.
inline std::vector<int> peel_ranks(const std::vector<std::pair<double, double>>& pts) {
  auto dom = [](const std::pair<double, double>& a, const std::pair<double, double>& b) {
    return a.first <= b.first && a.second <= b.second &&
           (a.first < b.first || a.second < b.second);
  };
  std::vector<int> rank(pts.size(), 0);
  int k = 0;
  std::size_t left = pts.size();
  while (left > 0) {
    ++k;
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (rank[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < pts.size() && !dominated; ++j)
        if (j != i && !rank[j] && dom(pts[j], pts[i])) dominated = true;
      if (!dominated) front.push_back(i);
    }
    for (auto i : front) rank[i] = k;
    left -= front.size();
  }
  return rank;
}

// ---- 1-d clustering --------------------------------------------------------

// Minimum within-class sum of squares over all ways to cut sorted values into
// k contiguous non-empty classes.
inline double best_partition_ssd(std::vector<double> v, int k) {
  std::sort(v.begin(), v.end());
  const int n = static_cast<int>(v.size());
  auto ssd = [&](int lo, int hi) {
    double mean = 0;
    for (int i = lo; i < hi; ++i) mean += v[static_cast<std::size_t>(i)];
    mean /= hi - lo;
    double s = 0;
    for (int i = lo; i < hi; ++i) s += (v[static_cast<std::size_t>(i)] - mean) * (v[static_cast<std::size_t>(i)] - mean);
    return s;
  };
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> cuts;
  std::function<void(int, int, double)> rec = [&](int start, int left, double acc) {
    if (left == 1) {
      best = std::min(best, acc + ssd(start, n));
      return;
    }
    for (int end = start + 1; end <= n - (left - 1); ++end) rec(end, left - 1, acc + ssd(start, end));
  };
  rec(0, k, 0.0);
  return best;
}

inline double partition_ssd(std::vector<double> v, const std::vector<double>& breaks) {
  std::sort(v.begin(), v.end());
  std::vector<std::vector<double>> groups(breaks.size() + 1);
  for (double x : v) {
    std::size_t g = 0;
    while (g < breaks.size() && x > breaks[g]) ++g;
    groups[g].push_back(x);
  }
  double s = 0;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    double mean = 0;
    for (double x : g) mean += x;
    mean /= static_cast<double>(g.size());
    for (double x : g) s += (x - mean) * (x - mean);
  }
  return s;
}

// ---- geometric median ------------------------------------------------------

inline double sum_dist(const std::vector<std::pair<double, double>>& p, double x, double y) {
  double s = 0;
  for (const auto& q : p) s += std::hypot(q.first - x, q.second - y);
  return s;
}

// Zooming grid search: 41x41 grid over a window, recentred on the best cell
// and shrunk by 4 each round. The objective is convex so the window keeps
// the minimiser.
inline std::pair<double, double> grid_median(const std::vector<std::pair<double, double>>& p,
                                             double resolution) {
  double x0 = p[0].first, x1 = x0, y0 = p[0].second, y1 = y0;
  for (const auto& q : p) {
    x0 = std::min(x0, q.first);
    x1 = std::max(x1, q.first);
    y0 = std::min(y0, q.second);
    y1 = std::max(y1, q.second);
  }
  double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  double half = 0.5 * std::max({x1 - x0, y1 - y0, 1.0});
  const int g = 40;
  while (half > resolution) {
    double best = std::numeric_limits<double>::infinity(), bx = cx, by = cy;
    for (int i = 0; i <= g; ++i)
      for (int j = 0; j <= g; ++j) {
        const double x = cx - half + 2 * half * i / g;
        const double y = cy - half + 2 * half * j / g;
        const double f = sum_dist(p, x, y);
        if (f < best) {
          best = f;
          bx = x;
          by = y;
        }
      }
    cx = bx;
    cy = by;
    half /= 4;
  }
  return {cx, cy};
}

// ---- single-task trees -----------------------------------------------------

struct Table {
  std::vector<std::vector<int>> x;
  std::vector<int> levels;  // per attribute
  std::vector<int> c;
  std::vector<double> y;
  int classes = 0;
};

inline double class_entropy(const Table& t, const std::vector<std::size_t>& rows) {
  std::vector<double> n(static_cast<std::size_t>(t.classes), 0.0);
  for (auto r : rows) n[static_cast<std::size_t>(t.c[r])] += 1;
  double h = 0;
  for (double k : n)
    if (k > 0) {
      const double p = k / static_cast<double>(rows.size());
      h -= p * std::log2(p);
    }
  return h;
}

inline double sum_squares(const Table& t, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0;
  double m = 0;
  for (auto r : rows) m += t.y[r];
  m /= static_cast<double>(rows.size());
  double s = 0;
  for (auto r : rows) s += (t.y[r] - m) * (t.y[r] - m);
  return s;
}

inline std::vector<std::vector<std::size_t>> partition(const Table& t,
                                                       const std::vector<std::size_t>& rows,
                                                       int a) {
  std::vector<std::vector<std::size_t>> parts(static_cast<std::size_t>(t.levels[static_cast<std::size_t>(a)]));
  for (auto r : rows) parts[static_cast<std::size_t>(t.x[r][static_cast<std::size_t>(a)])].push_back(r);
  return parts;
}

// A split recorded along a breadth-first walk: path of level choices from
// the root and the attribute chosen there (-1 for a leaf).
struct Visit {
  std::vector<int> path;
  int attribute = -1;
  bool tie = false;  // top two scores within tolerance
};

// Greedy single-objective tree. score(rows, attribute) is maximised; a split
// is taken only when its score exceeds `min_gain`. Children are visited in
// level order.
inline void single_task_tree(const Table& t, const std::vector<std::size_t>& rows,
                             std::vector<bool> used, int depth, int max_depth,
                             std::size_t min_leaf, std::vector<int> path,
                             const std::function<double(const std::vector<std::size_t>&, int)>& score,
                             const std::function<bool(const std::vector<std::size_t>&)>& pure,
                             double min_gain, std::vector<Visit>& out) {
  Visit v;
  v.path = path;
  if (depth >= max_depth || pure(rows)) {
    out.push_back(v);
    return;
  }
  double best = -std::numeric_limits<double>::infinity(), second = best;
  int arg = -1;
  for (int a = 0; a < static_cast<int>(t.levels.size()); ++a) {
    if (used[static_cast<std::size_t>(a)]) continue;
    const auto parts = partition(t, rows, a);
    std::size_t present = 0, smallest = rows.size();
    for (const auto& p : parts)
      if (!p.empty()) {
        ++present;
        smallest = std::min(smallest, p.size());
      }
    if (present < 2 || smallest < min_leaf) continue;
    const double s = score(rows, a);
    if (s > best) {
      second = best;
      best = s;
      arg = a;
    } else if (s > second) {
      second = s;
    }
  }
  if (arg < 0 || best <= min_gain) {
    out.push_back(v);
    return;
  }
  v.attribute = arg;
  v.tie = best - second < 1e-9;
  out.push_back(v);
  used[static_cast<std::size_t>(arg)] = true;
  const auto parts = partition(t, rows, arg);
  for (std::size_t l = 0; l < parts.size(); ++l) {
    if (parts[l].empty()) continue;
    auto p = path;
    p.push_back(static_cast<int>(l));
    single_task_tree(t, parts[l], used, depth + 1, max_depth, min_leaf, p, score, pure, min_gain,
                     out);
  }
}

inline double information_gain(const Table& t, const std::vector<std::size_t>& rows, int a) {
  double h = class_entropy(t, rows);
  for (const auto& p : partition(t, rows, a))
    if (!p.empty())
      h -= static_cast<double>(p.size()) / static_cast<double>(rows.size()) * class_entropy(t, p);
  return h;
}

inline double ss_reduction(const Table& t, const std::vector<std::size_t>& rows, int a) {
  double s = sum_squares(t, rows);
  for (const auto& p : partition(t, rows, a)) s -= sum_squares(t, p);
  return s;
}

}  // namespace oracle
