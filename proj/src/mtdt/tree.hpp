#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtdt/dataset.hpp"
#include "mtdt/ranking.hpp"

namespace tourkit::mtdt {

struct Hyperparams {
  std::vector<int> max_depth_grid{1, 2, 3, 4, 5};
  int max_depth = 5;  // used by grow_tree
  int min_samples_leaf = 1;
  int cv_folds = 10;
  double validation_fraction = 0.1;
  SecondaryMode secondary_mode = SecondaryMode::distance;
  bool oversample = false;
  std::uint64_t seed = 0;
  // Weights of mean validation rho and R^2 in the depth-selection score.
  double rho_weight = 1.0;
  double r2_weight = 1.0;
};

// Candidate summary kept on internal nodes for reports.
struct CandidateRecord {
  std::string attribute;
  double ssr = 0.0;
  double ig = 0.0;
  int rank = 0;
};

struct Node {
  int id = 0;  // breadth-first number, root = 1
  int depth = 0;
  std::size_t count = 0;
  std::vector<std::size_t> class_counts;
  std::vector<double> distribution;  // class probabilities, sums to 1
  double mean = 0.0;
  double variance = 0.0;

  // Internal nodes only.
  int attribute = -1;
  std::vector<int> children;  // per level of the attribute; -1 when the level was unseen
  int fallback = -1;          // child used for unseen levels
  std::vector<CandidateRecord> candidates;

  bool is_leaf() const { return attribute < 0; }
};

struct MultiTaskTree {
  std::vector<Attribute> attributes;
  std::vector<std::string> classes;
  std::string class_target;
  std::string numeric_target;
  bool has_numeric = true;
  std::vector<Node> nodes;  // nodes[0] is the root, stored breadth-first

  std::size_t leaf_count() const;
  int depth() const;
};

MultiTaskTree grow_tree(const TrainingSet& data, const Hyperparams& params);

struct Prediction {
  std::vector<double> distribution;
  int predicted_class = 0;  // argmax; ties go to the earlier class
  double numeric = 0.0;
  std::size_t leaf = 0;  // index into nodes
  int leaf_id = 0;
};

Prediction predict(const MultiTaskTree& tree, std::span<const int> levels);

// Index of the leaf reached by each row.
std::vector<std::size_t> assign_leaves(const MultiTaskTree& tree, const TrainingSet& data);

}  // namespace tourkit::mtdt
