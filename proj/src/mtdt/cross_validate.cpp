#include "mtdt/cross_validate.hpp"

#include <algorithm>
#include <map>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "eval/metrics.hpp"

namespace tourkit::mtdt {

namespace {

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[static_cast<std::size_t>(rng.below(i))]);
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& classes,
                                                       int folds, std::uint64_t seed) {
  if (folds < 2) fail(ErrorCode::invalid_argument, "cross-validation needs at least 2 folds");
  if (classes.size() < static_cast<std::size_t>(folds)) {
    fail(ErrorCode::domain, "fewer rows (" + std::to_string(classes.size()) + ") than folds (" +
                                std::to_string(folds) + ")");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t r = 0; r < classes.size(); ++r) by_class[classes[r]].push_back(r);
  Rng rng(derive_seed(seed, "folds"));
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
  std::size_t next = 0;
  for (auto& [cls, rows] : by_class) {
    shuffle(rows, rng);
    for (const auto r : rows) {
      out[next].push_back(r);
      next = (next + 1) % out.size();
    }
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

TrainingSet oversample_minority(const TrainingSet& data, std::uint64_t seed,
                                std::vector<std::string>* warnings) {
  std::vector<std::vector<std::size_t>> by_class(data.classes.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    by_class[static_cast<std::size_t>(data.y_class[r])].push_back(r);
  }
  std::size_t present = 0, target = 0;
  for (const auto& rows : by_class) {
    if (!rows.empty()) ++present;
    target = std::max(target, rows.size());
  }
  if (present < 2) {
    if (warnings) warnings->push_back("oversampling skipped: fewer than two classes present");
    return data;
  }
  TrainingSet out = data;
  Rng rng(derive_seed(seed, "oversample"));
  for (const auto& rows : by_class) {
    if (rows.empty()) continue;
    for (std::size_t k = rows.size(); k < target; ++k) {
      out.append_row(data, rows[static_cast<std::size_t>(rng.below(rows.size()))]);
    }
  }
  return out;
}

CrossValidationResult cross_validate(const TrainingSet& data, const Hyperparams& params) {
  if (params.max_depth_grid.empty()) fail(ErrorCode::invalid_argument, "empty max_depth grid");
  const auto folds = stratified_folds(data.y_class, params.cv_folds, params.seed);
  std::vector<int> grid = params.max_depth_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // Training partitions are independent of depth; build them once.
  std::vector<TrainingSet> train_sets, validation_sets;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> train_rows;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    TrainingSet train = data.subset(train_rows);
    if (params.oversample) train = oversample_minority(train, derive_seed(params.seed, "fold", f));
    train_sets.push_back(std::move(train));
    validation_sets.push_back(data.subset(folds[f]));
  }

  CrossValidationResult result;
  for (const int depth : grid) {
    Hyperparams p = params;
    p.max_depth = depth;
    DepthScore score;
    score.depth = depth;
    double rho_sum = 0.0, r2_sum = 0.0;
    std::size_t r2_n = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const auto tree = grow_tree(train_sets[f], p);
      const auto& val = validation_sets[f];
      rho_sum += eval::rho_metrics(tree, val).rho;
      if (data.has_numeric) {
        std::vector<double> pred(val.size());
        for (std::size_t r = 0; r < val.size(); ++r) pred[r] = predict(tree, val.x[r]).numeric;
        try {
          r2_sum += eval::regression_r2(pred, val.y_numeric);
          ++r2_n;
        } catch (const Error&) {
          // constant validation target: R^2 undefined for this fold
        }
      }
    }
    score.mean_rho = rho_sum / static_cast<double>(folds.size());
    if (r2_n) score.mean_r2 = r2_sum / static_cast<double>(r2_n);
    score.score = params.rho_weight * score.mean_rho +
                  (score.mean_r2 ? params.r2_weight * *score.mean_r2 : 0.0);
    result.table.push_back(score);
  }
  const DepthScore* best = &result.table.front();
  for (const auto& s : result.table) {
    if (s.score > best->score) best = &s;
  }
  result.best_depth = best->depth;
  return result;
}

}  // namespace tourkit::mtdt
