#pragma once

// Random unit-disk topologies, SPT/MST multicast trees, pruning and the
// layered (per-transmitter) transmission schedule.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace crmcast {

using NodeId = int;
using Rng = std::mt19937_64;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct Edge {
  NodeId u = 0;  // u < v
  NodeId v = 0;
  double d = 0.0;
};

/// Undirected weighted graph over placed nodes. Edge weights are the
/// Euclidean distances between endpoints; edges are kept sorted by (u, v).
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<Point> nodes, double area_side, double comm_range);

  /// Builds a topology with an explicit edge list. Distances are recomputed
  /// from the coordinates; duplicate pairs and self-loops are rejected.
  static Topology with_edges(std::vector<Point> nodes,
                             const std::vector<std::pair<NodeId, NodeId>>& pairs,
                             double area_side, double comm_range);

  /// Builds a graph from explicit weighted edges, with no geometry attached.
  /// Used for tree oracles on abstract graphs; node positions are zero.
  static Topology from_weighted_edges(int n, std::vector<Edge> edges);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  double area_side() const { return area_side_; }
  double comm_range() const { return comm_range_; }

  /// Neighbor lists in ascending id order, each entry (neighbor, distance).
  std::vector<std::vector<std::pair<NodeId, double>>> adjacency() const;

  bool is_connected() const;

 private:
  void normalize_edges();

  std::vector<Point> nodes_;
  std::vector<Edge> edges_;
  double area_side_ = 0.0;
  double comm_range_ = 0.0;
};

struct TopologyOptions {
  int placement_retries = 50;
  double range_growth = 1.10;
};

/// Uniform placement in [0, area_side]^2 with unit-disk connectivity.
/// Placement is resampled up to `placement_retries` times; after that the
/// last placement is kept and comm_range grows geometrically until the
/// graph is connected (at the area diagonal the graph is complete).
Topology generate_topology(int n, double area_side, double comm_range, Rng& rng,
                           const TopologyOptions& options = {});

/// Rows `node_id,x,y` followed by rows `u,v`; area and range travel in
/// `#area_side=` / `#comm_range=` comment lines.
void write_topology(std::ostream& out, const Topology& topology);
Topology read_topology(std::istream& in);

/// Rooted tree. Children lists keep insertion order; the builders insert
/// in ascending id order.
class Tree {
 public:
  Tree() = default;
  explicit Tree(NodeId root);

  /// Adds `child` under `parent`, which must already be in the tree.
  void attach(NodeId parent, NodeId child, double dist);

  NodeId root() const { return root_; }
  bool contains(NodeId v) const;
  std::size_t node_count() const { return parent_.size() + 1; }
  std::size_t edge_count() const { return parent_.size(); }

  /// Parent of a non-root node.
  NodeId parent(NodeId v) const;
  /// Distance from a non-root node to its parent.
  double edge_dist(NodeId v) const;
  const std::vector<NodeId>& children(NodeId v) const;
  bool is_leaf(NodeId v) const { return children(v).empty(); }

  /// All spanned nodes in ascending order.
  std::vector<NodeId> nodes() const;
  /// Node sequence from root to v, inclusive.
  std::vector<NodeId> path_from_root(NodeId v) const;
  /// Sum of edge distances along the root path.
  double root_distance(NodeId v) const;
  double total_weight() const;
  /// Set of undirected edges as ordered (min, max) pairs.
  std::set<std::pair<NodeId, NodeId>> edge_set() const;

  const std::map<NodeId, NodeId>& parent_map() const { return parent_; }

  bool operator==(const Tree& other) const = default;

 private:
  NodeId root_ = 0;
  std::map<NodeId, NodeId> parent_;
  std::map<NodeId, std::vector<NodeId>> children_;
  std::map<NodeId, double> edge_dist_;
};

enum class TreeKind { Spt, Mst };

std::string to_string(TreeKind kind);
TreeKind parse_tree_kind(const std::string& text);

/// Dijkstra shortest-path tree. Equal-distance ties go to the lower
/// predecessor id.
Tree build_spt(const Topology& topology, NodeId root);

/// Kruskal minimum spanning tree over edges ordered by (d, u, v), re-rooted
/// at `root`.
Tree build_mst(const Topology& topology, NodeId root);

Tree build_tree(TreeKind kind, const Topology& topology, NodeId root);

/// Keeps exactly the union of root-to-destination paths.
/// Throws std::invalid_argument for an empty destination set, the root as
/// a destination or a destination outside the tree.
Tree prune_tree(const Tree& tree, const std::set<NodeId>& destinations);

struct LayerEntry {
  NodeId transmitter = 0;
  std::vector<NodeId> receivers;

  bool operator==(const LayerEntry&) const = default;
};

struct LayerSchedule {
  std::vector<LayerEntry> entries;
};

/// One entry per internal node, ordered by depth and then by transmitter id.
LayerSchedule layerize(const Tree& tree);

/// Uniform sample of `count` distinct non-root nodes.
std::set<NodeId> sample_destinations(int n_nodes, int count, NodeId root, Rng& rng);

}  // namespace crmcast
