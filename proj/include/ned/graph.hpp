#pragma once

// Directed labeled subgraph around a central item, plus the views the models
// consume: hop truncation, triplet lists, reification and adjacency.
//
// Node order everywhere is breadth-first from the central node over outgoing
// edges, visiting each node's edges in insertion order. Nodes unreachable from
// the center follow in insertion order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ned/errors.hpp"

namespace ned {

struct Triplet {
  std::string source;
  std::string relation;
  std::string target;

  friend bool operator==(const Triplet&, const Triplet&) = default;
  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

class KnowledgeGraph {
 public:
  struct NodeEntry {
    std::string id;
    std::string label;
  };

  KnowledgeGraph(std::string central_id, std::string central_label) : central_(central_id) {
    add_node(std::move(central_id), std::move(central_label));
  }

  /// Returns false when the id already exists (the first label wins).
  bool add_node(std::string id, std::string label) {
    if (index_.contains(id)) return false;
    index_.emplace(id, nodes_.size());
    nodes_.push_back({std::move(id), std::move(label)});
    return true;
  }

  /// Returns false for an exact duplicate triplet, which is dropped.
  bool add_edge(const std::string& source, const std::string& relation, const std::string& target) {
    if (!has_node(source) || !has_node(target))
      throw ContractError("edge '" + source + "' -[" + relation + "]-> '" + target +
                          "' references an unknown node");
    Triplet t{source, relation, target};
    if (!edge_set_.insert(t).second) return false;
    out_edges_[index_.at(source)].push_back(edges_.size());
    edges_.push_back(std::move(t));
    return true;
  }

  const std::string& central() const { return central_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool has_node(const std::string& id) const { return index_.contains(id); }
  const std::string& label(const std::string& id) const { return nodes_.at(index_.at(id)).label; }
  const std::vector<NodeEntry>& nodes() const { return nodes_; }
  const std::vector<Triplet>& edges() const { return edges_; }

  /// Node ids in breadth-first order from the central node.
  std::vector<std::string> bfs_order() const {
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<std::string> order;
    order.reserve(nodes_.size());
    for (std::size_t i : bfs_indices(SIZE_MAX)) {
      seen[i] = true;
      order.push_back(nodes_[i].id);
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (!seen[i]) order.push_back(nodes_[i].id);
    return order;
  }

  /// Hop distance from the center for every node within `max_hops`.
  std::unordered_map<std::string, std::size_t> hop_distances(std::size_t max_hops) const {
    std::unordered_map<std::string, std::size_t> dist;
    std::vector<std::size_t> depth(nodes_.size(), SIZE_MAX);
    for (std::size_t i : bfs_indices(max_hops, &depth)) dist.emplace(nodes_[i].id, depth[i]);
    return dist;
  }

  /// Outgoing edge indices of a node, in insertion order.
  const std::vector<std::size_t>& out_edges(const std::string& id) const {
    static const std::vector<std::size_t> kNone;
    auto it = out_edges_.find(index_.at(id));
    return it == out_edges_.end() ? kNone : it->second;
  }

 private:
  std::vector<std::size_t> bfs_indices(std::size_t max_hops, std::vector<std::size_t>* depth_out = nullptr) const {
    std::vector<std::size_t> depth(nodes_.size(), SIZE_MAX);
    std::vector<std::size_t> order;
    std::deque<std::size_t> queue;
    const std::size_t start = index_.at(central_);
    depth[start] = 0;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      order.push_back(u);
      if (depth[u] >= max_hops) continue;
      auto it = out_edges_.find(u);
      if (it == out_edges_.end()) continue;
      for (std::size_t e : it->second) {
        const std::size_t v = index_.at(edges_[e].target);
        if (depth[v] != SIZE_MAX) continue;
        depth[v] = depth[u] + 1;
        queue.push_back(v);
      }
    }
    if (depth_out) *depth_out = std::move(depth);
    return order;
  }

  std::string central_;
  std::vector<NodeEntry> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Triplet> edges_;
  std::set<Triplet> edge_set_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> out_edges_;
};

/// Nodes within `k` directed hops of the center and the edges among them.
inline KnowledgeGraph truncate_khop(const KnowledgeGraph& g, std::size_t k) {
  const auto dist = g.hop_distances(k);
  KnowledgeGraph out(g.central(), g.label(g.central()));
  for (const auto& id : g.bfs_order())
    if (dist.contains(id)) out.add_node(id, g.label(id));
  for (const auto& e : g.edges())
    if (dist.contains(e.source) && dist.contains(e.target)) out.add_edge(e.source, e.relation, e.target);
  return out;
}

/// Every edge once, grouped by the BFS position of its source node and in
/// insertion order within a source.
inline std::vector<Triplet> triplets(const KnowledgeGraph& g) {
  std::vector<Triplet> out;
  out.reserve(g.edge_count());
  for (const auto& id : g.bfs_order())
    for (std::size_t e : g.out_edges(id)) out.push_back(g.edges()[e]);
  return out;
}

/// Id given to the node that replaces edge number `index` of a reified graph.
/// The leading unit separator keeps it disjoint from item labels.
inline std::string relation_node_id(std::size_t index) { return "\x1frel:" + std::to_string(index); }

/// Replaces each edge (u, r, v) with a node labeled r and edges u -> r -> v.
inline KnowledgeGraph reify(const KnowledgeGraph& g) {
  KnowledgeGraph out(g.central(), g.label(g.central()));
  for (const auto& n : g.nodes()) out.add_node(n.id, n.label);
  std::size_t index = 0;
  for (const auto& t : triplets(g)) {
    const std::string rel = relation_node_id(index++);
    out.add_node(rel, t.relation);
    out.add_edge(t.source, "", rel);
    out.add_edge(rel, "", t.target);
  }
  return out;
}

/// Dense 0/1 adjacency in BFS node order; entry (i, j) is 1 iff i -> j.
struct AdjacencyMatrix {
  std::vector<std::string> order;
  std::vector<std::uint8_t> cells;

  std::size_t size() const { return order.size(); }
  std::uint8_t operator()(std::size_t i, std::size_t j) const { return cells[i * order.size() + j]; }
};

inline AdjacencyMatrix adjacency(const KnowledgeGraph& g) {
  AdjacencyMatrix a;
  a.order = g.bfs_order();
  const std::size_t n = a.order.size();
  a.cells.assign(n * n, 0);
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos.emplace(a.order[i], i);
  for (const auto& e : g.edges()) a.cells[pos.at(e.source) * n + pos.at(e.target)] = 1;
  return a;
}

// ---------------------------------------------------------------------------
// Graph store: JSON lines of
//   {"id": "Q1", "label": "...", "aliases": [...], "triplets": [[s, r, o], ...]}

struct ItemRecord {
  std::string id;
  std::string label;
  std::vector<std::string> aliases;
  std::vector<std::array<std::string, 3>> triplets;
};

inline void to_json(nlohmann::json& j, const ItemRecord& r) {
  j = nlohmann::json{{"id", r.id}, {"label", r.label}, {"aliases", r.aliases}, {"triplets", r.triplets}};
}

inline void from_json(const nlohmann::json& j, ItemRecord& r) {
  j.at("id").get_to(r.id);
  j.at("label").get_to(r.label);
  r.aliases = j.value("aliases", std::vector<std::string>{});
  r.triplets = j.value("triplets", std::vector<std::array<std::string, 3>>{});
}

/// Exported item neighborhoods keyed by item id.
class GraphStore {
 public:
  static GraphStore load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph store '" + path + "'");
    GraphStore store;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ItemRecord item;
      try {
        item = nlohmann::json::parse(line).get<ItemRecord>();
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("graph store: ") + e.what(), line_no);
      }
      store.add(std::move(item));
    }
    return store;
  }

  void add(ItemRecord item) {
    const std::string id = item.id;
    items_.insert_or_assign(id, std::move(item));
  }

  bool contains(const std::string& id) const { return items_.contains(id); }
  const ItemRecord& item(const std::string& id) const {
    auto it = items_.find(id);
    if (it == items_.end()) throw ContractError("graph store has no item '" + id + "'");
    return it->second;
  }
  std::size_t size() const { return items_.size(); }
  const std::map<std::string, ItemRecord>& items() const { return items_; }

  /// The item's neighborhood as a graph whose node ids are the labels. The
  /// central node is the item's own label.
  KnowledgeGraph graph(const std::string& id) const {
    const ItemRecord& it = item(id);
    KnowledgeGraph g(it.label, it.label);
    for (const auto& [s, r, o] : it.triplets) {
      g.add_node(s, s);
      g.add_node(o, o);
      g.add_edge(s, r, o);
    }
    return g;
  }

 private:
  std::map<std::string, ItemRecord> items_;
};

}  // namespace ned
