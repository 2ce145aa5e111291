#pragma once

#include <filesystem>
#include <string>

#include "mtdt/tree.hpp"

namespace tourkit::mtdt {

std::string tree_to_json(const MultiTaskTree& tree);
MultiTaskTree tree_from_json(const std::string& text);

// Graphviz rendering: numbered nodes, split attribute on internal nodes,
// class distribution and numeric mean on leaves.
std::string tree_to_dot(const MultiTaskTree& tree);

void save_tree(const MultiTaskTree& tree, const std::filesystem::path& json_path);
MultiTaskTree load_tree(const std::filesystem::path& json_path);

}  // namespace tourkit::mtdt
