#include "mtdt/dataset.hpp"

#include "core/error.hpp"

namespace tourkit::mtdt {

std::size_t TrainingSet::attribute_index(const std::string& name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i].name == name) return i;
  }
  fail(ErrorCode::invalid_argument, "unknown attribute '" + name + "'");
}

void TrainingSet::validate() const {
  if (classes.empty()) fail(ErrorCode::validation, "training set declares no classes");
  if (x.size() != y_class.size() || (has_numeric && y_numeric.size() != y_class.size())) {
    fail(ErrorCode::validation, "training set columns have different lengths");
  }
  if (!row_ids.empty() && row_ids.size() != y_class.size()) {
    fail(ErrorCode::validation, "row_ids length does not match rows");
  }
  for (std::size_t r = 0; r < x.size(); ++r) {
    if (x[r].size() != attributes.size()) {
      fail(ErrorCode::validation, "row " + std::to_string(r) + " has wrong attribute count");
    }
    for (std::size_t a = 0; a < attributes.size(); ++a) {
      if (x[r][a] < 0 || static_cast<std::size_t>(x[r][a]) >= attributes[a].levels.size()) {
        fail(ErrorCode::validation, "row " + std::to_string(r) + " attribute '" +
                                        attributes[a].name + "' has an invalid level");
      }
    }
    if (y_class[r] < 0 || static_cast<std::size_t>(y_class[r]) >= classes.size()) {
      fail(ErrorCode::validation, "row " + std::to_string(r) + " has an invalid class");
    }
  }
}

TrainingSet TrainingSet::empty_like() const {
  TrainingSet out;
  out.attributes = attributes;
  out.classes = classes;
  out.class_target = class_target;
  out.numeric_target = numeric_target;
  out.has_numeric = has_numeric;
  return out;
}

void TrainingSet::append_row(const TrainingSet& from, std::size_t row) {
  x.push_back(from.x[row]);
  y_class.push_back(from.y_class[row]);
  if (has_numeric) y_numeric.push_back(from.y_numeric[row]);
  if (!from.row_ids.empty()) row_ids.push_back(from.row_ids[row]);
}

TrainingSet TrainingSet::subset(std::span<const std::size_t> rows) const {
  TrainingSet out = empty_like();
  out.x.reserve(rows.size());
  for (const auto r : rows) out.append_row(*this, r);
  return out;
}

}  // namespace tourkit::mtdt
