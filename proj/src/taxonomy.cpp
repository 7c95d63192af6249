#include "svt/taxonomy.hpp"

#include <algorithm>

#include "svt/errors.hpp"

namespace svt {

namespace {
std::string join_path(const LabelPath& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += '/';
        out += path[i];
    }
    return out;
}
}  // namespace

NodeId Taxonomy::add_node(const std::string& name, NodeId parent) {
    const NodeId id = static_cast<NodeId>(nodes_.size());
    Node n;
    n.name = name;
    n.parent = parent;
    n.depth = parent == kNoNode ? 0 : nodes_[parent].depth + 1;
    nodes_.push_back(std::move(n));
    if (parent != kNoNode) nodes_[parent].children.push_back(id);
    return id;
}

NodeId Taxonomy::child_named(NodeId parent, const std::string& name) const {
    for (NodeId c : nodes_[parent].children)
        if (nodes_[c].name == name) return c;
    return kNoNode;
}

Taxonomy Taxonomy::build(const std::vector<LabelPath>& paths) {
    if (paths.empty()) throw EmptyPath("no label paths given");

    Taxonomy t;
    t.add_node("<root>", kNoNode);

    for (const LabelPath& path : paths) {
        if (path.empty()) throw EmptyPath("empty label path");
        NodeId cur = t.root();
        for (const std::string& name : path) {
            NodeId next = t.child_named(cur, name);
            if (next == kNoNode) next = t.add_node(name, cur);
            cur = next;
        }
        t.leaf_index_.emplace(path, cur);
    }

    // A full path that is a strict prefix of another would make a leaf
    // class an internal node; no sample class could then map to a leaf.
    for (const auto& [path, id] : t.leaf_index_)
        if (!t.nodes_[id].children.empty())
            throw InconsistentHierarchy("class path '" + join_path(path) +
                                        "' is also an internal node");

    // Children are always created after their parent, so one reverse sweep
    // sees every child before its parent.
    for (std::size_t i = t.nodes_.size(); i-- > 0;) {
        Node& n = t.nodes_[i];
        n.height = 0;
        for (NodeId c : n.children)
            n.height = std::max(n.height, t.nodes_[c].height + 1);
    }

    for (NodeId id = 0; id < t.nodes_.size(); ++id)
        if (t.nodes_[id].children.empty()) t.leaves_.push_back(id);

    return t;
}

std::optional<NodeId> Taxonomy::find_leaf(const LabelPath& path) const {
    const auto it = leaf_index_.find(path);
    if (it == leaf_index_.end()) return std::nullopt;
    return it->second;
}

NodeId Taxonomy::lcs(NodeId u, NodeId v) const {
    while (nodes_[u].depth > nodes_[v].depth) u = nodes_[u].parent;
    while (nodes_[v].depth > nodes_[u].depth) v = nodes_[v].parent;
    while (u != v) {
        u = nodes_[u].parent;
        v = nodes_[v].parent;
    }
    return u;
}

double Taxonomy::dissimilarity(NodeId u, NodeId v) const {
    if (u == v)
        throw SameClass("dissimilarity of '" + display_name(u) +
                        "' with itself");
    return static_cast<double>(nodes_[lcs(u, v)].height) /
           static_cast<double>(tree_height());
}

NodeId Taxonomy::ancestor_at_depth(NodeId id, int depth) const {
    if (depth < 0 || depth > nodes_[id].depth)
        throw BadLevel("node '" + display_name(id) + "' at depth " +
                       std::to_string(nodes_[id].depth) +
                       " has no ancestor at depth " + std::to_string(depth));
    while (nodes_[id].depth > depth) id = nodes_[id].parent;
    return id;
}

std::string Taxonomy::display_name(NodeId id) const {
    if (id == root()) return nodes_[0].name;
    std::string out = nodes_[id].name;
    for (NodeId p = nodes_[id].parent; p != 0; p = nodes_[p].parent)
        out = nodes_[p].name + "/" + out;
    return out;
}

}  // namespace svt
