#include "tsadforge/labels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace tsadforge {

LabelMasks empty_masks(Index n, Index d) {
  return {Mask::Zero(n, d), Mask::Zero(n, d), Mask::Zero(n, d)};
}

void merge_masks(LabelMasks& into, const LabelMasks& other) {
  if (into.rows() != other.rows() || into.cols() != other.cols())
    throw Error(ErrorCode::ShapeMismatch, "label masks differ in shape");
  into.rootcause = into.rootcause.cwiseMax(other.rootcause);
  into.propagated = into.propagated.cwiseMax(other.propagated);
  into.any = into.any.cwiseMax(other.any);
}

namespace {

void mark(Mask& m, int channel, Index begin, Index end) {
  begin = std::clamp<Index>(begin, 0, m.rows());
  end = std::clamp<Index>(end, 0, m.rows());
  for (Index t = begin; t < end; ++t) m(t, channel) = 1;
}

std::map<int, std::int64_t> relax(const Dag& dag, const ArxParams& arx, int source,
                                  const std::function<bool(std::size_t)>& usable) {
  constexpr auto kInf = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> dist(static_cast<std::size_t>(dag.n_nodes), kInf);
  dist[static_cast<std::size_t>(source)] = 0;
  std::vector<std::vector<std::size_t>> out_edges(static_cast<std::size_t>(dag.n_nodes));
  for (std::size_t e = 0; e < dag.edges.size(); ++e)
    out_edges[static_cast<std::size_t>(dag.edges[e].parent)].push_back(e);
  for (int v : dag.topo_order) {
    const auto dv = dist[static_cast<std::size_t>(v)];
    if (dv == kInf) continue;
    for (std::size_t e : out_edges[static_cast<std::size_t>(v)]) {
      if (!usable(e)) continue;
      auto& dc = dist[static_cast<std::size_t>(dag.edges[e].child)];
      dc = std::min(dc, dv + arx.lag[e]);
    }
  }
  std::map<int, std::int64_t> out;
  for (int v = 0; v < dag.n_nodes; ++v)
    if (v != source && dist[static_cast<std::size_t>(v)] != kInf) out[v] = dist[static_cast<std::size_t>(v)];
  return out;
}

}  // namespace

LabelMasks label_exogenous(const AnomalySpec& spec, Index n, Index d) {
  LabelMasks m = empty_masks(n, d);
  mark(m.rootcause, spec.channel, spec.t_start, spec.t_end);
  m.any = m.rootcause;
  return m;
}

std::map<int, std::int64_t> min_path_lag(const Dag& dag, const ArxParams& arx, int source) {
  return relax(dag, arx, source, [](std::size_t) { return true; });
}

std::map<int, std::int64_t> effective_path_lag(const Dag& dag, const ArxParams& arx, const Eigen::VectorXd& alphas,
                                                int source, double alpha_min) {
  return relax(dag, arx, source, [&](std::size_t e) {
    const int parent = dag.edges[e].parent;
    if (arx.gain[e] == 0.0) return false;
    return parent == source || alphas[parent] > alpha_min;
  });
}

std::int64_t decay_horizon(double a, double epsilon) {
  const double mag = std::abs(a);
  if (mag == 0.0) return 0;
  if (mag >= 1.0) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(std::ceil(std::log(epsilon) / std::log(mag)));
}

LabelMasks label_endogenous(const AnomalySpec& spec, const Dag& dag, const ArxParams& arx,
                            const Eigen::VectorXd& alphas, Index n, Index d, const LabelPolicy& policy) {
  LabelMasks m = empty_masks(n, d);
  mark(m.rootcause, spec.channel, spec.t_start, spec.t_end);
  const auto cap = static_cast<std::int64_t>(std::floor(policy.horizon_cap_frac * static_cast<double>(n)));
  for (const auto& [k, lag] : effective_path_lag(dag, arx, alphas, spec.channel, policy.alpha_min)) {
    if (!(alphas[k] > policy.alpha_min)) continue;
    const std::int64_t horizon = std::min(decay_horizon(arx.a[k], policy.epsilon), cap);
    mark(m.propagated, k, spec.t_start + lag, std::min<std::int64_t>(n, spec.t_end + lag + horizon));
  }
  m.any = m.rootcause.cwiseMax(m.propagated);
  return m;
}

}  // namespace tsadforge
