#include "tsadforge/causal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace tsadforge {

std::vector<std::size_t> Dag::incoming(int node) const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].child == node) out.push_back(e);
  return out;
}

std::vector<int> Dag::children(int node) const {
  std::vector<int> out;
  for (const auto& e : edges)
    if (e.parent == node) out.push_back(e.child);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> Dag::descendants(int node) const {
  std::vector<char> seen(static_cast<std::size_t>(n_nodes), 0);
  std::vector<int> stack{node};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& e : edges) {
      if (e.parent == v && !seen[static_cast<std::size_t>(e.child)]) {
        seen[static_cast<std::size_t>(e.child)] = 1;
        stack.push_back(e.child);
      }
    }
  }
  std::vector<int> out;
  for (int v = 0; v < n_nodes; ++v)
    if (seen[static_cast<std::size_t>(v)] && v != node) out.push_back(v);
  return out;
}

bool Dag::is_valid() const {
  if (static_cast<int>(topo_order.size()) != n_nodes) return false;
  std::vector<int> position(static_cast<std::size_t>(n_nodes), -1);
  for (int k = 0; k < n_nodes; ++k) {
    const int v = topo_order[static_cast<std::size_t>(k)];
    if (v < 0 || v >= n_nodes || position[static_cast<std::size_t>(v)] != -1) return false;
    position[static_cast<std::size_t>(v)] = k;
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (e.parent < 0 || e.parent >= n_nodes || e.child < 0 || e.child >= n_nodes) return false;
    if (e.parent == e.child) return false;
    if (!seen.emplace(e.parent, e.child).second) return false;
    if (position[static_cast<std::size_t>(e.parent)] >= position[static_cast<std::size_t>(e.child)]) return false;
  }
  return true;
}

std::int64_t CausalPriors::lag_max(std::int64_t n) const noexcept {
  return std::max<std::int64_t>(0, std::min<std::int64_t>(lag_max_cap, n / std::max(1, lag_max_divisor)));
}

double edge_probability(int n_nodes, double density_target) noexcept {
  if (n_nodes < 2) return 0.0;
  const double pairs = 0.5 * n_nodes * (n_nodes - 1);
  const double expected = std::min(density_target * n_nodes, pairs);
  return std::clamp(expected / pairs, 0.0, 1.0);
}

Dag sample_dag(int n_nodes, double p_edge, RngStream& stream) {
  Dag dag;
  dag.n_nodes = n_nodes;
  dag.topo_order.resize(static_cast<std::size_t>(n_nodes));
  std::iota(dag.topo_order.begin(), dag.topo_order.end(), 0);
  for (int i = n_nodes - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(stream.uniform_int(0, i));
    std::swap(dag.topo_order[static_cast<std::size_t>(i)], dag.topo_order[j]);
  }
  for (int i = 0; i < n_nodes; ++i) {
    for (int j = i + 1; j < n_nodes; ++j) {
      if (stream.uniform() < p_edge)
        dag.edges.push_back({dag.topo_order[static_cast<std::size_t>(i)], dag.topo_order[static_cast<std::size_t>(j)]});
    }
  }
  return dag;
}

ArxParams sample_arx(const Dag& dag, const CausalPriors& priors, std::int64_t n, RngStream& stream) {
  ArxParams arx;
  arx.a.resize(dag.n_nodes);
  arx.c.resize(dag.n_nodes);
  for (int i = 0; i < dag.n_nodes; ++i) {
    arx.a[i] = stream.uniform(priors.a_min, priors.a_max);
    arx.c[i] = stream.uniform(priors.bias_min, priors.bias_max);
  }
  std::vector<int> indegree(static_cast<std::size_t>(dag.n_nodes), 0);
  for (const auto& e : dag.edges) ++indegree[static_cast<std::size_t>(e.child)];

  const std::int64_t lag_max = priors.lag_max(n);
  for (const auto& e : dag.edges) {
    const double sd = priors.gain_scale / std::sqrt(1.0 + indegree[static_cast<std::size_t>(e.child)]);
    arx.gain.push_back(sd * stream.normal());
    arx.lag.push_back(stream.uniform_int(0, lag_max));
  }
  return arx;
}

CausalSystem simulate_system(const Panel& baselines, const Dag& dag, const ArxParams& arx,
                             const Eigen::VectorXd& alphas) {
  const Index n = baselines.rows();
  const Index d = baselines.cols();
  if (d != dag.n_nodes || arx.a.size() != d || arx.c.size() != d || alphas.size() != d ||
      arx.gain.size() != dag.edges.size() || arx.lag.size() != dag.edges.size()) {
    throw Error(ErrorCode::ShapeMismatch, "baselines, dag, arx and alphas disagree on channel count");
  }

  std::vector<std::vector<std::size_t>> parents(static_cast<std::size_t>(d));
  for (std::size_t e = 0; e < dag.edges.size(); ++e)
    parents[static_cast<std::size_t>(dag.edges[e].child)].push_back(e);

  CausalSystem sys{dag, arx, alphas, Panel::Zero(n, d), Panel::Zero(n, d)};
  for (Index t = 0; t < n; ++t) {
    for (int i : dag.topo_order) {
      double zi = t > 0 ? arx.a[i] * sys.z(t - 1, i) : 0.0;
      for (std::size_t e : parents[static_cast<std::size_t>(i)]) {
        const Index src = t - arx.lag[e];
        if (src >= 0) zi += arx.gain[e] * sys.x(src, dag.edges[e].parent);
      }
      zi += arx.c[i];
      sys.z(t, i) = zi;
      sys.x(t, i) = (1.0 - alphas[i]) * baselines(t, i) + alphas[i] * zi;
    }
  }
  return sys;
}

}  // namespace tsadforge
