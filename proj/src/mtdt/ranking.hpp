#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <optional>
#include <vector>

namespace tourkit::mtdt {

// How to choose among several rank-1 split candidates.
enum class SecondaryMode { precedence_ig, precedence_ssr, distance };

std::string_view to_string(SecondaryMode mode);
std::optional<SecondaryMode> parse_secondary_mode(std::string_view text);

struct SplitCandidate {
  std::size_t attribute = 0;
  std::string name;
  double ssr = 0.0;  // F1, minimized
  double ig = 0.0;   // F2, maximized

  // Min-max normalized canonical objectives (both lower-is-better);
  // filled by normalize_objectives().
  double norm_ssr = 0.0;
  double norm_ig_gap = 0.0;

  int domination_count = 0;                 // n_p
  std::vector<std::size_t> dominated;       // S_p, indices into the candidate list
  int rank = 0;
};

// a dominates b in the canonical space (SSR, -IG).
bool dominates(const SplitCandidate& a, const SplitCandidate& b);

// Non-dominated sorting: rank 1 is the Pareto front, rank k+1 the front
// left after removing ranks <= k. Fills domination_count, dominated, rank.
void rank_candidates(std::vector<SplitCandidate>& candidates);

// Maps (SSR, IG_max - IG) onto [0,1] per objective over all candidates.
// A constant objective normalizes to 0.
void normalize_objectives(std::vector<SplitCandidate>& candidates);

// Index of the chosen rank-1 candidate. Requires ranks and normalized
// objectives. Ties break by attribute name.
std::size_t select_split(const std::vector<SplitCandidate>& candidates, SecondaryMode mode);

}  // namespace tourkit::mtdt
