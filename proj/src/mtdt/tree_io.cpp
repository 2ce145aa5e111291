#include "mtdt/tree_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace tourkit::mtdt {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kFormat = "tourkit.mtdt/1";

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string tree_to_json(const MultiTaskTree& tree) {
  json j;
  j["format"] = kFormat;
  j["class_target"] = tree.class_target;
  j["numeric_target"] = tree.has_numeric ? json(tree.numeric_target) : json(nullptr);
  j["classes"] = tree.classes;
  json attrs = json::array();
  for (const auto& a : tree.attributes) {
    attrs.push_back({{"name", a.name}, {"levels", a.levels}, {"ordered", a.ordered}});
  }
  j["attributes"] = attrs;
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    json e;
    e["id"] = n.id;
    e["depth"] = n.depth;
    e["n"] = n.count;
    e["class_counts"] = n.class_counts;
    e["distribution"] = n.distribution;
    e["mean"] = n.mean;
    e["variance"] = n.variance;
    if (n.is_leaf()) {
      e["leaf"] = true;
    } else {
      const auto& attr = tree.attributes[static_cast<std::size_t>(n.attribute)];
      json split;
      split["attribute"] = attr.name;
      json children = json::object();
      for (std::size_t l = 0; l < n.children.size(); ++l) {
        if (n.children[l] >= 0) {
          children[attr.levels[l]] = tree.nodes[static_cast<std::size_t>(n.children[l])].id;
        }
      }
      split["children"] = children;
      split["fallback"] = tree.nodes[static_cast<std::size_t>(n.fallback)].id;
      json cands = json::array();
      for (const auto& c : n.candidates) {
        cands.push_back({{"attribute", c.attribute}, {"SSR", c.ssr}, {"IG", c.ig}, {"rank", c.rank}});
      }
      split["candidates"] = cands;
      e["split"] = split;
    }
    nodes.push_back(e);
  }
  j["nodes"] = nodes;
  return j.dump(2);
}

MultiTaskTree tree_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("tree JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != kFormat) fail(ErrorCode::parse, "tree JSON: unsupported format");
    MultiTaskTree tree;
    tree.class_target = j.at("class_target").get<std::string>();
    tree.has_numeric = !j.at("numeric_target").is_null();
    if (tree.has_numeric) tree.numeric_target = j.at("numeric_target").get<std::string>();
    tree.classes = j.at("classes").get<std::vector<std::string>>();
    for (const auto& a : j.at("attributes")) {
      tree.attributes.push_back({a.at("name").get<std::string>(),
                                 a.at("levels").get<std::vector<std::string>>(),
                                 a.value("ordered", true)});
    }
    const auto& nodes = j.at("nodes");
    std::map<int, int> index_of_id;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      index_of_id[nodes[i].at("id").get<int>()] = static_cast<int>(i);
    }
    auto index = [&](int id) {
      const auto it = index_of_id.find(id);
      if (it == index_of_id.end()) fail(ErrorCode::parse, "tree JSON: unknown node id " + std::to_string(id));
      return it->second;
    };
    for (const auto& e : nodes) {
      Node n;
      n.id = e.at("id").get<int>();
      n.depth = e.at("depth").get<int>();
      n.count = e.at("n").get<std::size_t>();
      n.class_counts = e.at("class_counts").get<std::vector<std::size_t>>();
      n.distribution = e.at("distribution").get<std::vector<double>>();
      n.mean = e.at("mean").get<double>();
      n.variance = e.at("variance").get<double>();
      if (n.distribution.size() != tree.classes.size()) {
        fail(ErrorCode::parse, "tree JSON: node " + std::to_string(n.id) + " distribution size");
      }
      if (e.contains("split")) {
        const auto& s = e.at("split");
        const auto name = s.at("attribute").get<std::string>();
        int attr = -1;
        for (std::size_t a = 0; a < tree.attributes.size(); ++a) {
          if (tree.attributes[a].name == name) attr = static_cast<int>(a);
        }
        if (attr < 0) fail(ErrorCode::parse, "tree JSON: unknown split attribute '" + name + "'");
        const auto& levels = tree.attributes[static_cast<std::size_t>(attr)].levels;
        n.attribute = attr;
        n.children.assign(levels.size(), -1);
        for (const auto& [level, id] : s.at("children").items()) {
          const auto it = std::find(levels.begin(), levels.end(), level);
          if (it == levels.end()) fail(ErrorCode::parse, "tree JSON: unknown level '" + level + "'");
          n.children[static_cast<std::size_t>(it - levels.begin())] = index(id.get<int>());
        }
        n.fallback = index(s.at("fallback").get<int>());
        if (s.contains("candidates")) {
          for (const auto& c : s.at("candidates")) {
            n.candidates.push_back({c.at("attribute").get<std::string>(), c.at("SSR").get<double>(),
                                    c.at("IG").get<double>(), c.at("rank").get<int>()});
          }
        }
      }
      tree.nodes.push_back(std::move(n));
    }
    if (tree.nodes.empty()) fail(ErrorCode::parse, "tree JSON: no nodes");
    return tree;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("tree JSON: ") + e.what());
  }
}

std::string tree_to_dot(const MultiTaskTree& tree) {
  std::ostringstream os;
  os << "digraph mtdt {\n  node [shape=box, fontname=\"Helvetica\"];\n";
  for (const auto& n : tree.nodes) {
    std::ostringstream label;
    label << "Node " << n.id << "\\nn = " << n.count;
    if (n.is_leaf()) {
      for (std::size_t c = 0; c < tree.classes.size(); ++c) {
        label << "\\n" << dot_escape(tree.classes[c]) << ": " << fixed(n.distribution[c], 3);
      }
      if (tree.has_numeric) {
        label << "\\n" << dot_escape(tree.numeric_target) << " = " << fixed(n.mean, 2);
      }
      os << "  n" << n.id << " [label=\"" << label.str() << "\", style=rounded];\n";
    } else {
      label << "\\n"
            << dot_escape(tree.attributes[static_cast<std::size_t>(n.attribute)].name);
      os << "  n" << n.id << " [label=\"" << label.str() << "\"];\n";
    }
  }
  for (const auto& n : tree.nodes) {
    if (n.is_leaf()) continue;
    const auto& attr = tree.attributes[static_cast<std::size_t>(n.attribute)];
    for (std::size_t l = 0; l < n.children.size(); ++l) {
      if (n.children[l] < 0) continue;
      os << "  n" << n.id << " -> n" << tree.nodes[static_cast<std::size_t>(n.children[l])].id
         << " [label=\"" << dot_escape(attr.levels[l]) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

void save_tree(const MultiTaskTree& tree, const std::filesystem::path& json_path) {
  if (json_path.has_parent_path()) std::filesystem::create_directories(json_path.parent_path());
  std::ofstream out(json_path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + json_path.string() + "'");
  out << tree_to_json(tree) << '\n';
}

MultiTaskTree load_tree(const std::filesystem::path& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + json_path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return tree_from_json(buf.str());
}

}  // namespace tourkit::mtdt
