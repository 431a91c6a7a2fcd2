// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/taxonomy.hpp"

#include <algorithm>
#include <fstream>

#include "csv.hpp"
#include "typobench/error.hpp"
#include "typobench/random.hpp"

namespace typobench {

namespace {

// Machine id of the Open Images root node.
constexpr std::string_view kOpenImagesRootId = "/m/0bl9f";

std::string display(const std::string& raw, const std::map<std::string, std::string>& names) {
  if (raw == kOpenImagesRootId) return std::string(kRootClass);
  const auto it = names.find(raw);
  return it == names.end() ? raw : it->second;
}

}  // namespace

int Taxonomy::index_of(std::string_view name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown class '" + std::string(name) + "'");
  return it->second;
}

int Taxonomy::add_node(std::string name, int parent) {
  const int id = static_cast<int>(nodes_.size());
  Node n;
  n.name = name;
  n.parent = parent;
  n.depth = parent < 0 ? 0 : nodes_[parent].depth + 1;
  nodes_.push_back(std::move(n));
  index_.emplace(std::move(name), id);
  if (parent >= 0) nodes_[parent].children.push_back(id);
  return id;
}

void Taxonomy::attach(const nlohmann::json& subtree, int parent,
                      const std::map<std::string, std::string>& display_names) {
  if (!subtree.is_object() || !subtree.contains("LabelName") ||
      !subtree["LabelName"].is_string()) {
    throw ValidationError("hierarchy node without a string LabelName");
  }
  const auto raw = subtree["LabelName"].get<std::string>();
  const auto name = display(raw, display_names);
  if (raw != name) aliases_.emplace(raw, name);

  int id;
  if (auto it = index_.find(name); it != index_.end()) {
    // Repeated class: the first placement wins and later children merge into
    // it, unless that would close a cycle.
    id = it->second;
    for (int p = parent; p >= 0; p = nodes_[p].parent) {
      if (p == id) return;
    }
  } else {
    id = add_node(name, parent);
  }
  if (subtree.contains("Subcategory")) {
    const auto& subs = subtree["Subcategory"];
    if (!subs.is_array()) throw ValidationError("Subcategory of '" + name + "' is not an array");
    for (const auto& child : subs) attach(child, id, display_names);
  }
}

Taxonomy Taxonomy::from_json(const nlohmann::json& tree,
                             const std::map<std::string, std::string>& display_names) {
  Taxonomy t;
  const bool single_entity_root =
      tree.is_object() && tree.contains("LabelName") && tree["LabelName"].is_string() &&
      display(tree["LabelName"].get<std::string>(), display_names) == kRootClass;

  if (single_entity_root) {
    t.attach(tree, -1, display_names);
  } else {
    const int root = t.add_node(std::string(kRootClass), -1);
    if (tree.is_array()) {
      for (const auto& sub : tree) t.attach(sub, root, display_names);
    } else {
      t.attach(tree, root, display_names);
    }
  }
  if (t.nodes_.empty()) throw ValidationError("empty hierarchy");
  return t;
}

Taxonomy Taxonomy::load(const std::filesystem::path& hierarchy,
                        const std::optional<std::filesystem::path>& class_names) {
  std::ifstream in(hierarchy);
  if (!in) throw ValidationError("cannot open hierarchy " + hierarchy.string());
  nlohmann::json tree;
  try {
    tree = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("hierarchy " + hierarchy.string() + ": " + e.what());
  }
  std::map<std::string, std::string> names;
  if (class_names) names = load_class_names(*class_names);
  return from_json(tree, names);
}

std::map<std::string, std::string> Taxonomy::load_class_names(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open class names " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() < 2) throw ValidationError("class names line without a comma: " + line);
    out.emplace(detail::trim(fields[0]), detail::trim(fields[1]));
  }
  return out;
}

bool Taxonomy::contains(std::string_view name) const { return index_.contains(name); }

std::optional<std::string> Taxonomy::resolve(std::string_view label) const {
  if (contains(label)) return std::string(label);
  if (auto it = aliases_.find(label); it != aliases_.end()) return it->second;
  return std::nullopt;
}

int Taxonomy::depth(std::string_view name) const { return nodes_[index_of(name)].depth; }

std::optional<std::string> Taxonomy::parent(std::string_view name) const {
  const int p = nodes_[index_of(name)].parent;
  if (p < 0) return std::nullopt;
  return nodes_[p].name;
}

std::vector<std::string> Taxonomy::children(std::string_view name) const {
  std::vector<std::string> out;
  for (int c : nodes_[index_of(name)].children) out.push_back(nodes_[c].name);
  return out;
}

std::vector<std::string> Taxonomy::ancestors(std::string_view name) const {
  std::vector<std::string> out;
  for (int p = nodes_[index_of(name)].parent; p >= 0; p = nodes_[p].parent) {
    out.push_back(nodes_[p].name);
  }
  return out;
}

std::vector<std::string> Taxonomy::descendants(std::string_view name) const {
  std::vector<std::string> out;
  std::vector<int> stack = {index_of(name)};
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    for (auto it = nodes_[n].children.rbegin(); it != nodes_[n].children.rend(); ++it) {
      out.push_back(nodes_[*it].name);
      stack.push_back(*it);
    }
  }
  return out;
}

bool Taxonomy::is_ancestor(std::string_view ancestor, std::string_view node) const {
  const int a = index_of(ancestor);
  for (int p = nodes_[index_of(node)].parent; p >= 0; p = nodes_[p].parent) {
    if (p == a) return true;
  }
  return false;
}

bool Taxonomy::is_leaf(std::string_view name) const {
  return nodes_[index_of(name)].children.empty();
}

std::string Taxonomy::lca(std::string_view a, std::string_view b) const {
  int x = index_of(a);
  int y = index_of(b);
  while (nodes_[x].depth > nodes_[y].depth) x = nodes_[x].parent;
  while (nodes_[y].depth > nodes_[x].depth) y = nodes_[y].parent;
  while (x != y) {
    x = nodes_[x].parent;
    y = nodes_[y].parent;
  }
  return nodes_[x].name;
}

int Taxonomy::tree_distance(std::string_view a, std::string_view b) const {
  return depth(a) + depth(b) - 2 * depth(lca(a, b));
}

std::vector<std::string> Taxonomy::classes() const {
  std::vector<std::string> out;
  out.reserve(nodes_.size() - 1);
  for (std::size_t i = 1; i < nodes_.size(); ++i) out.push_back(nodes_[i].name);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> Taxonomy::prune_to_most_specific(
    const std::vector<std::string>& labels) const {
  std::vector<std::string> unique(labels);
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  std::vector<std::string> out;
  for (const auto& l : unique) {
    index_of(l);
    const bool has_more_specific = std::any_of(unique.begin(), unique.end(), [&](const auto& o) {
      return o != l && is_ancestor(l, o);
    });
    if (!has_more_specific) out.push_back(l);
  }
  return out;
}

NegativeTriple Taxonomy::sample_negatives(std::string_view gt, std::uint64_t seed,
                                          const std::vector<std::string>& also_exclude) const {
  const int g = index_of(gt);
  if (g == 0) throw ValidationError("the root class cannot be a ground truth");

  // Ancestors of gt: anc[k] is the k-th ancestor, anc[0] = gt itself.
  std::vector<int> anc = {g};
  for (int p = nodes_[g].parent; p >= 0; p = nodes_[p].parent) anc.push_back(p);
  const int gt_depth = nodes_[g].depth;

  std::vector<char> excluded(nodes_.size(), 0);
  excluded[0] = 1;
  auto exclude_chain = [&](int n) {
    for (int p = n; p >= 0; p = nodes_[p].parent) excluded[p] = 1;
    std::vector<int> stack = {n};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      excluded[x] = 1;
      for (int c : nodes_[x].children) stack.push_back(c);
    }
  };
  exclude_chain(g);
  for (const auto& label : also_exclude) exclude_chain(index_of(label));

  // Depth of lca(x, gt) for every node, via the ancestor set of gt.
  std::vector<int> ancestor_rank(nodes_.size(), -1);
  for (std::size_t k = 0; k < anc.size(); ++k) ancestor_rank[anc[k]] = static_cast<int>(k);
  auto lca_rank = [&](int x) {
    while (ancestor_rank[x] < 0) x = nodes_[x].parent;
    return ancestor_rank[x];
  };
  std::vector<int> rank(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) rank[i] = lca_rank(static_cast<int>(i));

  std::vector<int> chosen;
  auto available = [&](int x) {
    return !excluded[x] && std::find(chosen.begin(), chosen.end(), x) == chosen.end();
  };
  auto collect = [&](auto&& pred) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const int x = static_cast<int>(i);
      if (available(x) && pred(x)) out.push_back(nodes_[x].name);
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  Rng rng(seed);
  auto draw = [&](const std::vector<std::string>& pool) {
    const auto& name = pool[rng.index(pool.size())];
    chosen.push_back(index_.find(name)->second);
    return name;
  };

  // Fallback ladder shared by all bands: widen to nodes whose lca with gt is
  // the k-th ancestor for k = from .. root, then any remaining class.
  auto fallback = [&](int from) {
    for (int k = from; k < static_cast<int>(anc.size()); ++k) {
      auto pool = collect([&](int x) { return rank[x] == k; });
      if (!pool.empty()) return pool;
    }
    return collect([](int) { return true; });
  };

  auto resolve_band = [&](std::vector<std::string> native, int fallback_from, bool& is_native) {
    is_native = !native.empty();
    if (native.empty()) native = fallback(fallback_from);
    if (native.empty()) {
      throw ValidationError("taxonomy too small to sample three distinct negatives for '" +
                            std::string(gt) + "'");
    }
    return draw(native);
  };

  NegativeTriple t;
  // hard: siblings.
  t.hard = resolve_band(
      collect([&](int x) { return nodes_[x].parent == anc[1]; }), 2, t.hard_native);
  // medium: cousins under the grandparent at gt's depth.
  t.medium = resolve_band(collect([&](int x) {
                            return anc.size() > 2 && rank[x] == 2 &&
                                   nodes_[x].depth == gt_depth;
                          }),
                          3, t.medium_native);
  // easy: leaves branching off at depth <= 1, strictly above the grandparent.
  const int easy_max_lca_depth = std::min(1, gt_depth - 3);
  t.easy = resolve_band(collect([&](int x) {
                          return nodes_[x].children.empty() &&
                                 gt_depth - rank[x] <= easy_max_lca_depth;
                        }),
                        3, t.easy_native);
  return t;
}

}  // namespace typobench
