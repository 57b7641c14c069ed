#include "dpim/conflict_graph.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <thread>
#include <unordered_map>

#include "dpim/error.hpp"

namespace dpim {

ConflictGraph::ConflictGraph(std::vector<TupleId> nodes, EdgeList edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::sort(nodes_.begin(), nodes_.end());
  if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end()) {
    throw InputError("conflict graph: duplicate node id");
  }
  for (auto& e : edges_) {
    if (e.first == e.second) throw InputError("conflict graph: self-loop");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  adjacency_.assign(nodes_.size(), {});
  std::vector<std::uint32_t> degree(nodes_.size(), 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> dense_edges;
  dense_edges.reserve(edges_.size());
  for (const auto& [u, v] : edges_) {
    auto iu = static_cast<std::uint32_t>(index_of(u));
    auto iv = static_cast<std::uint32_t>(index_of(v));
    dense_edges.emplace_back(iu, iv);
    ++degree[iu];
    ++degree[iv];
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) adjacency_[i].reserve(degree[i]);
  for (const auto& [iu, iv] : dense_edges) {
    adjacency_[iu].push_back(iv);
    adjacency_[iv].push_back(iu);
  }
  for (auto& neighbors : adjacency_) std::sort(neighbors.begin(), neighbors.end());
}

std::size_t ConflictGraph::index_of(TupleId id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
  if (it == nodes_.end() || *it != id) {
    throw InputError("conflict graph: unknown node id " + std::to_string(id));
  }
  return static_cast<std::size_t>(it - nodes_.begin());
}

StableEdgeOrder stable_edge_order(const ConflictGraph& graph) {
  return StableEdgeOrder{graph.edges()};
}

namespace {

// Evaluates one constraint over the dataset, appending violating pairs as
// (row index, row index) with first < second.
void collect_pairs_for_constraint(const Dataset& dataset, const BoundConstraint& bound,
                                  unsigned threads,
                                  std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) {
  const auto& rows = dataset.rows();
  const std::size_t n = rows.size();

  const auto& key_positions = bound.symmetric_equality_positions();
  if (!key_positions.empty()) {
    std::unordered_map<std::vector<Value>, std::vector<std::uint32_t>, ValueVecHash, ValueVecEq>
        buckets;
    buckets.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      std::vector<Value> key;
      key.reserve(key_positions.size());
      for (std::size_t pos : key_positions) key.push_back(rows[i][pos]);
      buckets[std::move(key)].push_back(i);
    }
    for (const auto& [key, members] : buckets) {
      for (std::size_t a = 0; a + 1 < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          std::uint32_t i = members[a], j = members[b];
          if (bound.violates(rows[i], rows[j])) out.emplace_back(i, j);
        }
      }
    }
    return;
  }

  // Strided row assignment balances the triangular pair space across workers.
  auto scan_strided = [&](std::size_t first, std::size_t stride) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> local;
    for (std::size_t i = first; i < n; i += stride) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (bound.violates(rows[i], rows[j])) {
          local.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
      }
    }
    return local;
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = std::min<unsigned>(workers, 16);
  if (workers <= 1 || n < 256) {
    auto local = scan_strided(0, 1);
    out.insert(out.end(), local.begin(), local.end());
    return;
  }
  std::vector<std::future<std::vector<std::pair<std::uint32_t, std::uint32_t>>>> futures;
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, scan_strided, w, workers));
  }
  for (auto& f : futures) {
    auto local = f.get();
    out.insert(out.end(), local.begin(), local.end());
  }
}

}  // namespace

ConflictGraph build_conflict_graph(const Dataset& dataset,
                                   std::span<const DenialConstraint> constraints,
                                   const BuildOptions& options) {
  if (constraints.empty()) throw InputError("build_conflict_graph: no constraints given");

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (const auto& dc : constraints) {
    BoundConstraint bound(dc, dataset.schema());
    collect_pairs_for_constraint(dataset, bound, options.threads, pairs);
  }

  EdgeList edges;
  edges.reserve(pairs.size());
  const auto& ids = dataset.ids();
  for (const auto& [i, j] : pairs) edges.emplace_back(ids[i], ids[j]);
  return ConflictGraph(ids, std::move(edges));
}

std::size_t f_edge_count(const ConflictGraph& graph) { return graph.edge_count(); }

std::size_t f_positive_degree_count(const ConflictGraph& graph) {
  std::size_t count = 0;
  for (const auto& neighbors : graph.adjacency()) {
    if (!neighbors.empty()) ++count;
  }
  return count;
}

std::size_t max_degree(const ConflictGraph& graph) {
  std::size_t best = 0;
  for (const auto& neighbors : graph.adjacency()) best = std::max(best, neighbors.size());
  return best;
}

ConflictGraph remove_node(const ConflictGraph& graph, TupleId id) {
  std::vector<TupleId> nodes;
  nodes.reserve(graph.node_count() - 1);
  for (TupleId node : graph.nodes()) {
    if (node != id) nodes.push_back(node);
  }
  if (nodes.size() == graph.node_count()) {
    throw InputError("remove_node: unknown node id " + std::to_string(id));
  }
  EdgeList edges;
  edges.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) {
    if (e.first != id && e.second != id) edges.push_back(e);
  }
  return ConflictGraph(std::move(nodes), std::move(edges));
}

void save_graph_cache(const ConflictGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << "nodes=" << graph.node_count() << "\n";
  for (const auto& [u, v] : graph.edges()) out << u << " " << v << "\n";
}

ConflictGraph load_graph_cache(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph cache " + path.string());
  std::string header;
  if (!std::getline(in, header) || header.rfind("nodes=", 0) != 0) {
    throw InputError("graph cache " + path.string() + ": missing `nodes=<n>` header");
  }
  std::size_t n = 0;
  try {
    n = std::stoull(header.substr(6));
  } catch (const std::exception&) {
    throw InputError("graph cache " + path.string() + ": malformed node count");
  }
  std::vector<TupleId> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = static_cast<TupleId>(i);
  EdgeList edges;
  TupleId u, v;
  while (in >> u >> v) {
    if (u >= n || v >= n) {
      throw InputError("graph cache " + path.string() + ": edge endpoint out of range");
    }
    edges.emplace_back(u, v);
  }
  return ConflictGraph(std::move(nodes), std::move(edges));
}

}  // namespace dpim
