#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace svt {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

using LabelPath = std::vector<std::string>;

/// Rooted semantic tree built from root-first label paths. Node 0 is always
/// a synthetic root sitting above the first label level, so a dataset whose
/// labels all share a single top category still forms one tree with the
/// same shape rules as a multi-category one. Immutable after build().
class Taxonomy {
public:
    struct Node {
        std::string name;
        NodeId parent = kNoNode;          // kNoNode only for the root
        std::vector<NodeId> children;
        int depth = 0;                    // edges from root
        int height = 0;                   // edges to deepest leaf below
    };

    /// Builds the tree as the union of all path prefixes under the synthetic
    /// root. Node identity is the full name path: two equal names under
    /// different parents are distinct nodes.
    ///
    /// Throws EmptyPath if the list or any path is empty, and
    /// InconsistentHierarchy if one full path is a strict prefix of another
    /// (a leaf class would then also be an internal node).
    static Taxonomy build(const std::vector<LabelPath>& paths);

    NodeId root() const { return 0; }
    std::size_t node_count() const { return nodes_.size(); }
    const Node& node(NodeId id) const { return nodes_[id]; }
    int tree_height() const { return nodes_[0].height; }

    bool is_leaf(NodeId id) const { return nodes_[id].children.empty(); }
    const std::vector<NodeId>& leaves() const { return leaves_; }

    /// Leaf node for a full label path, if one exists.
    std::optional<NodeId> find_leaf(const LabelPath& path) const;

    /// Deepest node that is an ancestor-or-self of both u and v.
    NodeId lcs(NodeId u, NodeId v) const;

    /// height(lcs(u,v)) / tree_height, the semantic dissimilarity between
    /// two distinct leaf classes. Throws SameClass when u == v.
    double dissimilarity(NodeId u, NodeId v) const;

    /// Ancestor of id at the given depth; throws BadLevel when the node is
    /// shallower than the requested depth.
    NodeId ancestor_at_depth(NodeId id, int depth) const;

    /// Label path joined with '/', for reports and dumps.
    std::string display_name(NodeId id) const;

private:
    NodeId add_node(const std::string& name, NodeId parent);
    NodeId child_named(NodeId parent, const std::string& name) const;

    std::vector<Node> nodes_;
    std::vector<NodeId> leaves_;                 // ascending NodeId
    std::map<LabelPath, NodeId> leaf_index_;
};

}  // namespace svt
