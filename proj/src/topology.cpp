#include "crmcast/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>

#include "crmcast/csv.hpp"

namespace crmcast {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// ---------------------------------------------------------------------------
// Topology

Topology::Topology(std::vector<Point> nodes, double area_side, double comm_range)
    : nodes_(std::move(nodes)), area_side_(area_side), comm_range_(comm_range) {
  const int n = size();
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) {
      const double d = distance(nodes_[u], nodes_[v]);
      if (d <= comm_range_) edges_.push_back({u, v, d});
    }
}

Topology Topology::with_edges(std::vector<Point> nodes,
                              const std::vector<std::pair<NodeId, NodeId>>& pairs,
                              double area_side, double comm_range) {
  Topology t;
  t.nodes_ = std::move(nodes);
  t.area_side_ = area_side;
  t.comm_range_ = comm_range;
  for (auto [u, v] : pairs) {
    if (u < 0 || v < 0 || u >= t.size() || v >= t.size())
      throw std::invalid_argument("edge endpoint out of range");
    t.edges_.push_back({u, v, distance(t.nodes_[u], t.nodes_[v])});
  }
  t.normalize_edges();
  return t;
}

Topology Topology::from_weighted_edges(int n, std::vector<Edge> edges) {
  Topology t;
  t.nodes_.assign(n, Point{});
  t.edges_ = std::move(edges);
  for (const auto& e : t.edges_)
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n || !(e.d > 0.0))
      throw std::invalid_argument("invalid weighted edge");
  t.normalize_edges();
  return t;
}

void Topology::normalize_edges() {
  for (auto& e : edges_) {
    if (e.u == e.v) throw std::invalid_argument("self-loop at node " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
      throw std::invalid_argument("duplicate edge " + std::to_string(edges_[i].u) + "," +
                                  std::to_string(edges_[i].v));
}

std::vector<std::vector<std::pair<NodeId, double>>> Topology::adjacency() const {
  std::vector<std::vector<std::pair<NodeId, double>>> adj(nodes_.size());
  for (const auto& e : edges_) {
    adj[e.u].emplace_back(e.v, e.d);
    adj[e.v].emplace_back(e.u, e.d);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

bool Topology::is_connected() const {
  const int n = size();
  if (n == 0) return true;
  // Union-find keeps this independent from the BFS used by the tests.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n;
  for (const auto& e : edges_) {
    const int a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

Topology generate_topology(int n, double area_side, double comm_range, Rng& rng,
                           const TopologyOptions& options) {
  if (n < 2) throw std::invalid_argument("generate_topology: need at least 2 nodes");
  if (!(area_side > 0.0) || !(comm_range > 0.0))
    throw std::invalid_argument("generate_topology: area_side and comm_range must be positive");

  std::uniform_real_distribution<double> coord(0.0, area_side);
  std::vector<Point> nodes(n);
  for (int attempt = 0; attempt <= options.placement_retries; ++attempt) {
    for (auto& p : nodes) {
      p.x = coord(rng);
      p.y = coord(rng);
    }
    Topology t(nodes, area_side, comm_range);
    if (t.is_connected()) return t;
  }

  const double diagonal = area_side * std::sqrt(2.0);
  double range = comm_range;
  while (true) {
    range = std::min(range * options.range_growth, diagonal);
    Topology t(nodes, area_side, range);
    if (t.is_connected() || range >= diagonal) return t;
  }
}

void write_topology(std::ostream& out, const Topology& topology) {
  out << "#area_side=" << format_double(topology.area_side()) << '\n';
  out << "#comm_range=" << format_double(topology.comm_range()) << '\n';
  for (NodeId i = 0; i < topology.size(); ++i) {
    const auto& p = topology.nodes()[i];
    out << i << ',' << format_double(p.x) << ',' << format_double(p.y) << '\n';
  }
  for (const auto& e : topology.edges()) out << e.u << ',' << e.v << '\n';
}

Topology read_topology(std::istream& in) {
  std::vector<Point> nodes;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  double area_side = 0.0, comm_range = 0.0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    try {
      if (text.front() == '#') {
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) continue;
        const auto key = trim(text.substr(1, eq - 1));
        const double value = parse_double(text.substr(eq + 1));
        if (key == "area_side") area_side = value;
        else if (key == "comm_range") comm_range = value;
        continue;
      }
      const auto fields = split_csv(text);
      if (fields.size() == 3) {
        const auto id = parse_int(fields[0]);
        if (id != static_cast<long long>(nodes.size()))
          throw std::invalid_argument("node ids must be consecutive from 0");
        nodes.push_back({parse_double(fields[1]), parse_double(fields[2])});
      } else if (fields.size() == 2) {
        pairs.emplace_back(static_cast<NodeId>(parse_int(fields[0])),
                           static_cast<NodeId>(parse_int(fields[1])));
      } else {
        throw std::invalid_argument("expected 2 or 3 fields");
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError("topology", lineno, e.what());
    }
  }
  return Topology::with_edges(std::move(nodes), pairs, area_side, comm_range);
}

// ---------------------------------------------------------------------------
// Tree

Tree::Tree(NodeId root) : root_(root) { children_[root]; }

void Tree::attach(NodeId parent, NodeId child, double dist) {
  if (!contains(parent)) throw std::invalid_argument("attach: unknown parent " + std::to_string(parent));
  if (contains(child)) throw std::invalid_argument("attach: node already in tree " + std::to_string(child));
  parent_[child] = parent;
  edge_dist_[child] = dist;
  children_[parent].push_back(child);
  children_[child];
}

bool Tree::contains(NodeId v) const { return children_.count(v) != 0; }

NodeId Tree::parent(NodeId v) const { return parent_.at(v); }

double Tree::edge_dist(NodeId v) const { return edge_dist_.at(v); }

const std::vector<NodeId>& Tree::children(NodeId v) const { return children_.at(v); }

std::vector<NodeId> Tree::nodes() const {
  std::vector<NodeId> out;
  out.reserve(children_.size());
  for (const auto& [v, _] : children_) out.push_back(v);
  return out;
}

std::vector<NodeId> Tree::path_from_root(NodeId v) const {
  if (!contains(v)) throw std::out_of_range("path_from_root: node not in tree");
  std::vector<NodeId> path{v};
  while (v != root_) {
    v = parent_.at(v);
    path.push_back(v);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double Tree::root_distance(NodeId v) const {
  double total = 0.0;
  while (v != root_) {
    total += edge_dist_.at(v);
    v = parent_.at(v);
  }
  return total;
}

double Tree::total_weight() const {
  double total = 0.0;
  for (const auto& [_, d] : edge_dist_) total += d;
  return total;
}

std::set<std::pair<NodeId, NodeId>> Tree::edge_set() const {
  std::set<std::pair<NodeId, NodeId>> out;
  for (const auto& [child, par] : parent_) out.emplace(std::min(child, par), std::max(child, par));
  return out;
}

std::string to_string(TreeKind kind) { return kind == TreeKind::Spt ? "spt" : "mst"; }

TreeKind parse_tree_kind(const std::string& text) {
  if (text == "spt" || text == "SPT") return TreeKind::Spt;
  if (text == "mst" || text == "MST") return TreeKind::Mst;
  throw std::invalid_argument("unknown tree kind '" + text + "'");
}

namespace {

void check_root(const Topology& topology, NodeId root) {
  if (root < 0 || root >= topology.size())
    throw std::invalid_argument("root " + std::to_string(root) + " out of range");
}

// Attaches nodes breadth-first from the root, children in ascending id order.
Tree tree_from_parents(NodeId root, const std::vector<NodeId>& parent,
                       const std::vector<double>& dist_to_parent) {
  const int n = static_cast<int>(parent.size());
  std::vector<std::vector<NodeId>> kids(n);
  for (NodeId v = 0; v < n; ++v)
    if (v != root) {
      if (parent[v] < 0) throw std::invalid_argument("graph is not connected");
      kids[parent[v]].push_back(v);
    }
  Tree tree(root);
  std::deque<NodeId> queue{root};
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : kids[u]) {
      tree.attach(u, v, dist_to_parent[v]);
      queue.push_back(v);
    }
  }
  return tree;
}

}  // namespace

Tree build_spt(const Topology& topology, NodeId root) {
  check_root(topology, root);
  const int n = topology.size();
  const auto adj = topology.adjacency();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<NodeId> parent(n, -1);
  std::vector<double> link(n, 0.0);
  std::vector<bool> done(n, false);

  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[root] = 0.0;
  heap.emplace(0.0, root);
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = true;
    for (const auto& [v, w] : adj[u]) {
      if (done[v]) continue;
      const double alt = du + w;
      if (alt < dist[v] || (alt == dist[v] && u < parent[v])) {
        dist[v] = alt;
        parent[v] = u;
        link[v] = w;
        heap.emplace(alt, v);
      }
    }
  }
  return tree_from_parents(root, parent, link);
}

Tree build_mst(const Topology& topology, NodeId root) {
  check_root(topology, root);
  const int n = topology.size();
  auto edges = topology.edges();
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.d, a.u, a.v) < std::tie(b.d, b.u, b.v);
  });

  std::vector<int> uf(n);
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };

  std::vector<std::vector<std::pair<NodeId, double>>> adj(n);
  int taken = 0;
  for (const auto& e : edges) {
    const int a = find(e.u), b = find(e.v);
    if (a == b) continue;
    uf[a] = b;
    adj[e.u].emplace_back(e.v, e.d);
    adj[e.v].emplace_back(e.u, e.d);
    if (++taken == n - 1) break;
  }
  if (taken != n - 1) throw std::invalid_argument("build_mst: graph is not connected");

  // Re-root: orient every MST edge away from the root.
  std::vector<NodeId> parent(n, -1);
  std::vector<double> link(n, 0.0);
  std::vector<bool> seen(n, false);
  std::deque<NodeId> queue{root};
  seen[root] = true;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (const auto& [v, w] : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        parent[v] = u;
        link[v] = w;
        queue.push_back(v);
      }
  }
  return tree_from_parents(root, parent, link);
}

Tree build_tree(TreeKind kind, const Topology& topology, NodeId root) {
  return kind == TreeKind::Spt ? build_spt(topology, root) : build_mst(topology, root);
}

Tree prune_tree(const Tree& tree, const std::set<NodeId>& destinations) {
  if (destinations.empty()) throw std::invalid_argument("prune_tree: no destinations to multicast to");
  std::set<NodeId> keep{tree.root()};
  for (NodeId d : destinations) {
    if (d == tree.root()) throw std::invalid_argument("prune_tree: root cannot be a destination");
    if (!tree.contains(d))
      throw std::invalid_argument("prune_tree: destination " + std::to_string(d) + " not in tree");
    for (NodeId v : tree.path_from_root(d)) keep.insert(v);
  }

  Tree pruned(tree.root());
  std::deque<NodeId> queue{tree.root()};
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : tree.children(u))
      if (keep.count(v)) {
        pruned.attach(u, v, tree.edge_dist(v));
        queue.push_back(v);
      }
  }
  return pruned;
}

LayerSchedule layerize(const Tree& tree) {
  LayerSchedule schedule;
  std::vector<NodeId> level{tree.root()};
  while (!level.empty()) {
    std::sort(level.begin(), level.end());
    std::vector<NodeId> next;
    for (NodeId u : level) {
      const auto& kids = tree.children(u);
      if (kids.empty()) continue;
      schedule.entries.push_back({u, kids});
      next.insert(next.end(), kids.begin(), kids.end());
    }
    level = std::move(next);
  }
  return schedule;
}

std::set<NodeId> sample_destinations(int n_nodes, int count, NodeId root, Rng& rng) {
  if (count < 1 || count > n_nodes - 1)
    throw std::invalid_argument("sample_destinations: need 1 <= count < n_nodes");
  std::vector<NodeId> pool;
  for (NodeId v = 0; v < n_nodes; ++v)
    if (v != root) pool.push_back(v);
  // Partial Fisher-Yates with an explicit index draw, so the result depends
  // only on the generator and not on std::sample's implementation.
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  return {pool.begin(), pool.begin() + count};
}

}  // namespace crmcast
