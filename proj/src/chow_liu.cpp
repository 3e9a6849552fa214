#include "ltree/chow_liu.hpp"

#include "ltree/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

namespace ltree {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

// Fills Σ̃ from variances and edge covariances. For every root u a
// traversal walks the tree outward; stepping from v to a child w multiplies
// by Σ̃_vw / Σ̃_vv, which accumulates the path product of correlations.
Matrix path_product(const Vector& variances, const SpanningTree& tree,
                    const Matrix& edge_cov) {
  const std::size_t p = tree.num_vertices();
  const auto adj = tree.adjacency();
  Matrix out = Matrix::Zero(idx(p), idx(p));
  std::vector<double> row(p);
  std::vector<std::size_t> stack;
  std::vector<bool> seen(p);

  for (std::size_t root = 0; root < p; ++root) {
    std::fill(seen.begin(), seen.end(), false);
    seen[root] = true;
    row[root] = variances[idx(root)];
    stack.assign(1, root);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : adj[v]) {
        if (seen[w]) continue;
        seen[w] = true;
        const double c = edge_cov(idx(v), idx(w));
        row[w] = v == root ? c : row[v] * (c / variances[idx(v)]);
        stack.push_back(w);
      }
    }
    out(idx(root), idx(root)) = variances[idx(root)];
    for (std::size_t w = root + 1; w < p; ++w) {
      out(idx(root), idx(w)) = row[w];
      out(idx(w), idx(root)) = row[w];
    }
  }
  return out;
}

CovMatrix checked_tree_cov(Matrix m) {
  try {
    return CovMatrix(std::move(m));
  } catch (const Error& e) {
    throw Error(ErrorCode::Internal,
                std::string("tree covariance construction failed: ") + e.what());
  }
}

double clamp_small_negative(double kl) {
  return (kl < 0.0 && kl > -1e-10) ? 0.0 : kl;
}

TreeApproxResult approximate(const CovMatrix& sigma, SpanningTree tree) {
  CovMatrix cov = tree_covariance(sigma, tree);
  const double kl = clamp_small_negative(kl_tree_simplified(sigma, cov));
  return {std::move(tree), std::move(cov), kl};
}

}  // namespace

SpanningTree::SpanningTree(std::size_t num_vertices, std::vector<Edge> edges)
    : num_vertices_(num_vertices), edges_(std::move(edges)) {
  if (num_vertices_ == 0) {
    throw Error(ErrorCode::InvalidArgument, "spanning tree needs a vertex");
  }
  if (edges_.size() != num_vertices_ - 1) {
    std::ostringstream msg;
    msg << "spanning tree on " << num_vertices_ << " vertices needs "
        << num_vertices_ - 1 << " edges, got " << edges_.size();
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  DisjointSets sets(num_vertices_);
  for (auto& [u, v] : edges_) {
    if (u >= num_vertices_ || v >= num_vertices_) {
      throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    }
    if (u == v) throw Error(ErrorCode::InvalidArgument, "self-loop in tree");
    if (u > v) std::swap(u, v);
    // n−1 edges with no cycle are necessarily connected.
    if (!sets.unite(u, v)) {
      throw Error(ErrorCode::InvalidArgument,
                  "edge list contains a cycle or duplicate edge");
    }
  }
  std::sort(edges_.begin(), edges_.end());
}

bool SpanningTree::has_edge(std::size_t u, std::size_t v) const {
  if (u > v) std::swap(u, v);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
}

std::vector<std::vector<std::size_t>> SpanningTree::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(num_vertices_);
  for (const auto& [u, v] : edges_) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

bool edge_set_equal(const SpanningTree& a, const SpanningTree& b) {
  if (a.num_vertices() != b.num_vertices()) {
    throw Error(ErrorCode::DimensionMismatch,
                "edge_set_equal: trees have different vertex counts");
  }
  return a.edges() == b.edges();
}

double tree_weight(const CovMatrix& sigma, const SpanningTree& tree) {
  if (sigma.dim() != tree.num_vertices()) {
    throw Error(ErrorCode::DimensionMismatch, "tree_weight: size mismatch");
  }
  double w = 0.0;
  for (const auto& [u, v] : tree.edges()) {
    w += pairwise_mutual_information(sigma, u, v);
  }
  return w;
}

SpanningTree decode_pruefer(std::size_t num_vertices,
                            std::span<const std::size_t> sequence) {
  if (num_vertices < 2 || sequence.size() != num_vertices - 2) {
    throw Error(ErrorCode::InvalidArgument,
                "Pruefer sequence length must be num_vertices - 2");
  }
  std::vector<std::size_t> degree(num_vertices, 1);
  for (std::size_t x : sequence) {
    if (x >= num_vertices) {
      throw Error(ErrorCode::InvalidArgument, "Pruefer symbol out of range");
    }
    ++degree[x];
  }
  std::vector<Edge> edges;
  edges.reserve(num_vertices - 1);
  for (std::size_t x : sequence) {
    std::size_t leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    edges.emplace_back(leaf, x);
    --degree[leaf];
    --degree[x];
  }
  std::size_t a = num_vertices, b = num_vertices;
  for (std::size_t v = 0; v < num_vertices; ++v) {
    if (degree[v] == 1) (a == num_vertices ? a : b) = v;
  }
  edges.emplace_back(a, b);
  return SpanningTree(num_vertices, std::move(edges));
}

CovMatrix tree_covariance(const CovMatrix& sigma, const SpanningTree& tree) {
  if (sigma.dim() != tree.num_vertices()) {
    throw Error(ErrorCode::DimensionMismatch,
                "tree_covariance: tree does not span the covariance");
  }
  return checked_tree_cov(
      path_product(sigma.matrix().diagonal(), tree, sigma.matrix()));
}

CovMatrix tree_covariance(const Vector& variances, const SpanningTree& tree,
                          std::span<const double> edge_correlations) {
  const std::size_t p = tree.num_vertices();
  if (static_cast<std::size_t>(variances.size()) != p ||
      edge_correlations.size() != tree.edges().size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "tree_covariance: parameter sizes do not match the tree");
  }
  if ((variances.array() <= 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument,
                "tree_covariance: variances must be positive");
  }
  Matrix edge_cov = Matrix::Zero(idx(p), idx(p));
  for (std::size_t k = 0; k < edge_correlations.size(); ++k) {
    const double rho = edge_correlations[k];
    if (!(std::abs(rho) < kDegenerateCorrelation)) {
      throw Error(ErrorCode::DegenerateCorrelation,
                  "tree_covariance: edge correlation must lie in (-1, 1)");
    }
    const auto [u, v] = tree.edges()[k];
    const double c = rho * std::sqrt(variances[idx(u)] * variances[idx(v)]);
    edge_cov(idx(u), idx(v)) = c;
    edge_cov(idx(v), idx(u)) = c;
  }
  return checked_tree_cov(path_product(variances, tree, edge_cov));
}

Matrix tree_precision(const CovMatrix& sigma_tree, const SpanningTree& tree) {
  const std::size_t p = tree.num_vertices();
  if (sigma_tree.dim() != p) {
    throw Error(ErrorCode::DimensionMismatch, "tree_precision: size mismatch");
  }
  Matrix prec = Matrix::Zero(idx(p), idx(p));
  std::vector<std::size_t> degree(p, 0);
  for (const auto& [u, v] : tree.edges()) {
    const double a = sigma_tree(u, u);
    const double b = sigma_tree(u, v);
    const double d = sigma_tree(v, v);
    const double det = a * d - b * b;
    if (!(det > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "tree_precision: singular edge marginal");
    }
    prec(idx(u), idx(u)) += d / det;
    prec(idx(v), idx(v)) += a / det;
    prec(idx(u), idx(v)) -= b / det;
    prec(idx(v), idx(u)) -= b / det;
    ++degree[u];
    ++degree[v];
  }
  for (std::size_t u = 0; u < p; ++u) {
    prec(idx(u), idx(u)) -=
        (static_cast<double>(degree[u]) - 1.0) / sigma_tree(u, u);
  }
  return prec;
}

TreeApproxResult chow_liu(const CovMatrix& sigma) {
  const std::size_t p = sigma.dim();
  if (p < 2) {
    throw Error(ErrorCode::InvalidArgument, "chow_liu requires dimension >= 2");
  }
  struct Candidate {
    double weight;
    std::size_t u, v;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(p * (p - 1) / 2);
  for (std::size_t u = 0; u < p; ++u) {
    for (std::size_t v = u + 1; v < p; ++v) {
      candidates.push_back({pairwise_mutual_information(sigma, u, v), u, v});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.weight != b.weight) return a.weight > b.weight;
              if (a.u != b.u) return a.u < b.u;
              return a.v < b.v;
            });

  DisjointSets sets(p);
  std::vector<Edge> edges;
  edges.reserve(p - 1);
  for (const auto& c : candidates) {
    if (sets.unite(c.u, c.v)) {
      edges.emplace_back(c.u, c.v);
      if (edges.size() == p - 1) break;
    }
  }
  return approximate(sigma, SpanningTree(p, std::move(edges)));
}

TreeApproxResult brute_force_optimal_tree(const CovMatrix& sigma) {
  const std::size_t p = sigma.dim();
  if (p < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "brute_force_optimal_tree requires dimension >= 2");
  }
  if (p > kBruteForceMaxDim) {
    std::ostringstream msg;
    msg << "brute_force_optimal_tree supports dimension <= "
        << kBruteForceMaxDim << ", got " << p;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }

  std::vector<std::size_t> seq(p - 2, 0);
  std::optional<TreeApproxResult> best;
  while (true) {
    TreeApproxResult cand = approximate(sigma, decode_pruefer(p, seq));
    if (!best) {
      best = std::move(cand);
    } else {
      const double tol = 1e-12 * std::max(1.0, std::abs(best->kl));
      if (cand.kl < best->kl - tol ||
          (cand.kl <= best->kl + tol && cand.tree.edges() < best->tree.edges())) {
        best = std::move(cand);
      }
    }
    // Advance the base-p odometer over all sequences.
    std::size_t k = 0;
    while (k < seq.size() && ++seq[k] == p) seq[k++] = 0;
    if (k == seq.size()) break;
  }
  return std::move(*best);
}

}  // namespace ltree
