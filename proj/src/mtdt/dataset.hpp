#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tourkit::mtdt {

// A categorical covariate. `ordered` marks levels with a natural order.
struct Attribute {
  std::string name;
  std::vector<std::string> levels;
  bool ordered = true;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

// Rows of categorical covariates with a categorical and an integer target.
struct TrainingSet {
  std::vector<Attribute> attributes;
  std::vector<std::string> classes;
  std::string class_target = "class";
  std::string numeric_target = "numeric";
  bool has_numeric = true;

  std::vector<std::vector<int>> x;  // x[row][attribute] = level index
  std::vector<int> y_class;
  std::vector<double> y_numeric;
  std::vector<std::string> row_ids;  // optional

  std::size_t size() const { return y_class.size(); }
  std::size_t attribute_index(const std::string& name) const;

  // Throws when shapes or level indices are inconsistent.
  void validate() const;

  TrainingSet subset(std::span<const std::size_t> rows) const;
  // Same schema, no rows.
  TrainingSet empty_like() const;
  void append_row(const TrainingSet& from, std::size_t row);
};

}  // namespace tourkit::mtdt
