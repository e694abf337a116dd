#pragma once

// Multivariate fusion: random DAG, Euler-discretised ARX dynamics on the latent
// causal channel z, and convex mixing with the per-channel baselines.

#include "tsadforge/rng.hpp"
#include "tsadforge/types.hpp"

#include <cstdint>
#include <vector>

namespace tsadforge {

struct Edge {
  int parent = 0;
  int child = 0;
};

struct Dag {
  int n_nodes = 0;
  std::vector<Edge> edges;
  std::vector<int> topo_order;

  /// Indices into `edges` whose child is `node`.
  std::vector<std::size_t> incoming(int node) const;
  std::vector<int> children(int node) const;
  /// All nodes reachable from `node` (excluding itself), ascending.
  std::vector<int> descendants(int node) const;
  /// No self loops, no duplicates, every edge forward in topo_order.
  bool is_valid() const;
};

struct CausalPriors {
  double edge_density_target = 1.5;  // expected edges per node
  int lag_max_cap = 20;              // lag_max(n) = min(cap, n / divisor)
  int lag_max_divisor = 50;
  double a_min = -0.8;
  double a_max = 0.8;
  double gain_scale = 0.5;
  double bias_min = -1.0;
  double bias_max = 1.0;
  double alpha_min = 0.0;
  double alpha_max = 1.0;

  std::int64_t lag_max(std::int64_t n) const noexcept;
};

/// Per-node decay a and bias c; per-edge gain and lag aligned with Dag::edges.
struct ArxParams {
  Eigen::VectorXd a;
  Eigen::VectorXd c;
  std::vector<double> gain;
  std::vector<std::int64_t> lag;
};

struct CausalSystem {
  Dag dag;
  ArxParams arx;
  Eigen::VectorXd alphas;
  Panel z;
  Panel x;
};

/// Edge probability giving an expected edge count of
/// min(density * N, N (N - 1) / 2).
double edge_probability(int n_nodes, double density_target) noexcept;

/// Each unordered pair kept with probability p_edge, oriented along a
/// uniformly random node permutation.
Dag sample_dag(int n_nodes, double p_edge, RngStream& stream);

/// a ~ U[a_min, a_max]; lag ~ U{0..lag_max(n)};
/// gain ~ N(0, (gain_scale / sqrt(1 + indeg(child)))^2); c ~ U[bias_min, bias_max].
ArxParams sample_arx(const Dag& dag, const CausalPriors& priors, std::int64_t n, RngStream& stream);

/// z_i[t] = a_i z_i[t-1] + sum_j b_ij x_j[t - l_ij] + c_i,
/// x_i[t] = (1 - alpha_i) base_i[t] + alpha_i z_i[t],
/// with out-of-range history reading 0. `baselines` is n x d. Throws ShapeMismatch.
CausalSystem simulate_system(const Panel& baselines, const Dag& dag, const ArxParams& arx,
                             const Eigen::VectorXd& alphas);

}  // namespace tsadforge
