#pragma once

#include "ltree/gaussian.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ltree {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected spanning tree on vertices [0, num_vertices). Edges are stored
/// normalized (smaller index first) and sorted lexicographically, so two
/// trees with the same edge set compare equal.
class SpanningTree {
 public:
  /// Throws InvalidArgument unless `edges` forms a spanning tree: exactly
  /// n−1 edges, in range, no self-loops or duplicates, connected.
  SpanningTree(std::size_t num_vertices, std::vector<Edge> edges);

  std::size_t num_vertices() const { return num_vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(std::size_t u, std::size_t v) const;
  /// Adjacency lists, neighbours in increasing order.
  std::vector<std::vector<std::size_t>> adjacency() const;

  bool operator==(const SpanningTree&) const = default;

 private:
  std::size_t num_vertices_;
  std::vector<Edge> edges_;
};

bool edge_set_equal(const SpanningTree& a, const SpanningTree& b);

/// Sum of pairwise mutual information over the tree's edges.
double tree_weight(const CovMatrix& sigma, const SpanningTree& tree);

/// Decodes a Prüfer sequence of length n−2 over [0, n) into its tree.
SpanningTree decode_pruefer(std::size_t num_vertices,
                            std::span<const std::size_t> sequence);

struct TreeApproxResult {
  SpanningTree tree;
  CovMatrix cov;
  /// kl_tree_simplified(Σ, cov), nats.
  double kl;
};

/// Tree-structured covariance that matches `sigma` on every variance and
/// every tree edge: off-diagonal entries are √(ΣᵤᵤΣᵥᵥ) times the product of
/// edge correlations along the tree path from u to v.
CovMatrix tree_covariance(const CovMatrix& sigma, const SpanningTree& tree);

/// Same construction from raw parameters: `variances[u]` and one
/// correlation per edge, aligned with tree.edges().
CovMatrix tree_covariance(const Vector& variances, const SpanningTree& tree,
                          std::span<const double> edge_correlations);

/// Precision matrix of a tree covariance assembled from its edge marginals:
///   Σ̃⁻¹ = Σ_(u,v)∈E  [Σ̃_{uv-block}]⁻¹ padded  −  Σ_u (deg(u) − 1) / Σ̃ᵤᵤ eᵤeᵤᵀ.
/// Non-edge entries are exactly zero.
Matrix tree_precision(const CovMatrix& sigma_tree, const SpanningTree& tree);

/// Chow-Liu: maximum mutual-information spanning tree (Kruskal, ties broken
/// by (weight desc, smaller vertex, larger vertex)) and its tree covariance.
TreeApproxResult chow_liu(const CovMatrix& sigma);

/// Exhaustive search over all p^(p−2) labeled spanning trees. p ≤ 8.
TreeApproxResult brute_force_optimal_tree(const CovMatrix& sigma);

inline constexpr std::size_t kBruteForceMaxDim = 8;

}  // namespace ltree
