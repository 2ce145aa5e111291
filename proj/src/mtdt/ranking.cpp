#include "mtdt/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace tourkit::mtdt {

std::string_view to_string(SecondaryMode mode) {
  switch (mode) {
    case SecondaryMode::precedence_ig: return "precedence_IG";
    case SecondaryMode::precedence_ssr: return "precedence_SSR";
    case SecondaryMode::distance: return "distance";
  }
  return "distance";
}

std::optional<SecondaryMode> parse_secondary_mode(std::string_view text) {
  if (text == "precedence_IG" || text == "precedence_ig") return SecondaryMode::precedence_ig;
  if (text == "precedence_SSR" || text == "precedence_ssr") return SecondaryMode::precedence_ssr;
  if (text == "distance") return SecondaryMode::distance;
  return std::nullopt;
}

bool dominates(const SplitCandidate& a, const SplitCandidate& b) {
  const double a1 = a.ssr, a2 = -a.ig;
  const double b1 = b.ssr, b2 = -b.ig;
  return a1 <= b1 && a2 <= b2 && (a1 < b1 || a2 < b2);
}

void rank_candidates(std::vector<SplitCandidate>& candidates) {
  const std::size_t n = candidates.size();
  std::vector<std::size_t> front;
  for (std::size_t p = 0; p < n; ++p) {
    auto& cp = candidates[p];
    cp.dominated.clear();
    cp.domination_count = 0;
    cp.rank = 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(cp, candidates[q])) {
        cp.dominated.push_back(q);
      } else if (dominates(candidates[q], cp)) {
        ++cp.domination_count;
      }
    }
    if (cp.domination_count == 0) {
      cp.rank = 1;
      front.push_back(p);
    }
  }
  std::vector<int> remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = candidates[i].domination_count;
  int k = 1;
  while (!front.empty()) {
    std::vector<std::size_t> next;
    for (const auto p : front) {
      for (const auto q : candidates[p].dominated) {
        if (--remaining[q] == 0) {
          candidates[q].rank = k + 1;
          next.push_back(q);
        }
      }
    }
    front = std::move(next);
    ++k;
  }
}

void normalize_objectives(std::vector<SplitCandidate>& candidates) {
  if (candidates.empty()) return;
  double ssr_min = std::numeric_limits<double>::infinity(), ssr_max = -ssr_min;
  double ig_min = ssr_min, ig_max = -ssr_min;
  for (const auto& c : candidates) {
    ssr_min = std::min(ssr_min, c.ssr);
    ssr_max = std::max(ssr_max, c.ssr);
    ig_min = std::min(ig_min, c.ig);
    ig_max = std::max(ig_max, c.ig);
  }
  const double ssr_range = ssr_max - ssr_min;
  const double ig_range = ig_max - ig_min;
  for (auto& c : candidates) {
    c.norm_ssr = ssr_range > 0 ? (c.ssr - ssr_min) / ssr_range : 0.0;
    c.norm_ig_gap = ig_range > 0 ? (ig_max - c.ig) / ig_range : 0.0;
  }
}

std::size_t select_split(const std::vector<SplitCandidate>& candidates, SecondaryMode mode) {
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].rank == 1) front.push_back(i);
  }
  if (front.empty()) fail(ErrorCode::domain, "select_split: empty rank-1 set");

  // Lower key wins; attribute name settles exact ties.
  auto pick = [&](auto key) {
    std::size_t best = front.front();
    for (const auto i : front) {
      const auto ki = key(candidates[i]);
      const auto kb = key(candidates[best]);
      if (ki < kb || (ki == kb && candidates[i].name < candidates[best].name)) best = i;
    }
    return best;
  };

  if (front.size() == 1) return front.front();
  switch (mode) {
    case SecondaryMode::precedence_ig:
      return pick([](const SplitCandidate& c) { return std::pair(-c.ig, c.ssr); });
    case SecondaryMode::precedence_ssr:
      return pick([](const SplitCandidate& c) { return std::pair(c.ssr, -c.ig); });
    case SecondaryMode::distance:
      break;
  }
  if (front.size() == 2) {
    return pick([](const SplitCandidate& c) { return c.norm_ssr + c.norm_ig_gap; });
  }
  double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1, lo2 = lo1, hi2 = -lo1;
  for (const auto& c : candidates) {
    lo1 = std::min(lo1, c.norm_ssr);
    hi1 = std::max(hi1, c.norm_ssr);
    lo2 = std::min(lo2, c.norm_ig_gap);
    hi2 = std::max(hi2, c.norm_ig_gap);
  }
  const double mid1 = 0.5 * (lo1 + hi1);
  const double mid2 = 0.5 * (lo2 + hi2);
  return pick([&](const SplitCandidate& c) {
    return std::abs(mid1 - c.norm_ssr) + std::abs(mid2 - c.norm_ig_gap);
  });
}

}  // namespace tourkit::mtdt
