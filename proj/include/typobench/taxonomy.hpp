// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace typobench {

inline constexpr std::string_view kRootClass = "Entity";

/// Hard, medium and easy MC negatives for one ground-truth class.
struct NegativeTriple {
  std::string hard;
  std::string medium;
  std::string easy;
  /// Whether each band was filled from its own definition rather than a
  /// fallback stage.
  bool hard_native = true;
  bool medium_native = true;
  bool easy_native = true;

  bool all_native() const { return hard_native && medium_native && easy_native; }

  friend bool operator==(const NegativeTriple&, const NegativeTriple&) = default;
};

/// Immutable class hierarchy rooted at "Entity". Safe to share across
/// threads once constructed.
class Taxonomy {
 public:
  /// Builds from the Open Images hierarchy JSON layout
  /// `{"LabelName": str, "Subcategory": [...]}`. A root not named Entity, or
  /// a top-level array of roots, is wrapped under a synthetic Entity root.
  /// `display_names` maps raw labels (e.g. machine ids) to class names.
  static Taxonomy from_json(const nlohmann::json& tree,
                            const std::map<std::string, std::string>& display_names = {});
  static Taxonomy load(const std::filesystem::path& hierarchy,
                       const std::optional<std::filesystem::path>& class_names = std::nullopt);

  /// Reads a `machine_id,display name` CSV.
  static std::map<std::string, std::string> load_class_names(
      const std::filesystem::path& path);

  std::size_t size() const { return nodes_.size(); }
  bool contains(std::string_view name) const;
  /// Maps a raw label (class name or machine id) to its class name.
  std::optional<std::string> resolve(std::string_view label) const;

  const std::string& root() const { return nodes_.front().name; }
  int depth(std::string_view name) const;
  std::optional<std::string> parent(std::string_view name) const;
  std::vector<std::string> children(std::string_view name) const;
  /// Ancestors from the parent up to the root.
  std::vector<std::string> ancestors(std::string_view name) const;
  std::vector<std::string> descendants(std::string_view name) const;
  bool is_ancestor(std::string_view ancestor, std::string_view node) const;
  bool is_leaf(std::string_view name) const;
  /// Lowest common ancestor.
  std::string lca(std::string_view a, std::string_view b) const;
  /// Edge count of the path between two classes.
  int tree_distance(std::string_view a, std::string_view b) const;
  /// All class names except the root, sorted.
  std::vector<std::string> classes() const;

  /// Removes every label that is an ancestor of another label. Sorted output.
  std::vector<std::string> prune_to_most_specific(
      const std::vector<std::string>& labels) const;

  /// Samples one negative per difficulty band. Excludes `gt`, its ancestors
  /// and descendants, and the same chain for every label in `also_exclude`.
  ///   hard:   siblings of gt
  ///   medium: cousins of gt (same grandparent, same depth)
  ///   easy:   leaves whose lowest common ancestor with gt sits at depth
  ///           <= 1 and strictly above the grandparent
  /// An empty band widens one ancestor level at a time, then falls back to
  /// any remaining class. Resolution order is hard, medium, easy.
  NegativeTriple sample_negatives(std::string_view gt, std::uint64_t seed,
                                  const std::vector<std::string>& also_exclude = {}) const;

 private:
  struct Node {
    std::string name;
    int parent = -1;
    int depth = 0;
    std::vector<int> children;
  };

  int index_of(std::string_view name) const;
  int add_node(std::string name, int parent);
  void attach(const nlohmann::json& subtree, int parent,
              const std::map<std::string, std::string>& display_names);

  std::vector<Node> nodes_;
  std::map<std::string, int, std::less<>> index_;
  std::map<std::string, std::string, std::less<>> aliases_;
};

}  // namespace typobench
