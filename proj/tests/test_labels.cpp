#include "tsadforge/labels.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace tsadforge;

namespace {

struct System {
  Dag dag;
  ArxParams arx;
  Eigen::VectorXd alpha;
};

// Edges given as (parent, child, gain, lag); topo order 0..d-1.
System make_system(int d, std::vector<std::tuple<int, int, double, std::int64_t>> edges, double a = 0.0) {
  System s;
  s.dag.n_nodes = d;
  for (int i = 0; i < d; ++i) s.dag.topo_order.push_back(i);
  for (auto [p, c, g, l] : edges) {
    s.dag.edges.push_back({p, c});
    s.arx.gain.push_back(g);
    s.arx.lag.push_back(l);
  }
  s.arx.a = Eigen::VectorXd::Constant(d, a);
  s.arx.c = Eigen::VectorXd::Zero(d);
  s.alpha = Eigen::VectorXd::Constant(d, 0.5);
  return s;
}

AnomalySpec window(int channel, std::int64_t ts, std::int64_t te) {
  AnomalySpec s;
  s.kind = AnomalyKind::PlateauConvex;
  s.mode = InjectionMode::Endogenous;
  s.channel = channel;
  s.t_start = ts;
  s.t_end = te;
  return s;
}

std::vector<Index> marked(const Mask& m, int channel) {
  std::vector<Index> out;
  for (Index t = 0; t < m.rows(); ++t)
    if (m(t, channel)) out.push_back(t);
  return out;
}

std::vector<Index> range(Index b, Index e) {
  std::vector<Index> out;
  for (Index t = b; t < e; ++t) out.push_back(t);
  return out;
}

}  // namespace

TEST_CASE("exogenous labels mark only the window") {
  AnomalySpec s = window(1, 40, 50);
  const LabelMasks m = label_exogenous(s, 100, 3);
  CHECK(marked(m.rootcause, 1) == range(40, 50));
  CHECK(m.rootcause.cast<int>().sum() == 10);
  CHECK(m.propagated.cast<int>().sum() == 0);
  CHECK(m.any == m.rootcause);
}

TEST_CASE("chain lags accumulate") {
  const System s = make_system(3, {{0, 1, 0.5, 2}, {1, 2, 0.5, 3}});
  const auto lags = min_path_lag(s.dag, s.arx, 0);
  CHECK(lags.at(1) == 2);
  CHECK(lags.at(2) == 5);
  CHECK(lags.size() == 2);
}

TEST_CASE("parallel paths take the shortest lag") {
  const System s = make_system(4, {{0, 1, 1.0, 1}, {1, 3, 1.0, 3}, {0, 2, 1.0, 3}, {2, 3, 1.0, 4}});
  CHECK(min_path_lag(s.dag, s.arx, 0).at(3) == 4);
  System long_only = s;
  long_only.arx.lag[1] = 6;  // path via 1 now 7
  CHECK(min_path_lag(long_only.dag, long_only.arx, 0).at(3) == 7);
}

TEST_CASE("child window shifted by lag") {
  const System s = make_system(2, {{0, 1, 0.8, 2}});
  const LabelMasks m = label_endogenous(window(0, 10, 20), s.dag, s.arx, s.alpha, 100, 2);
  CHECK(marked(m.rootcause, 0) == range(10, 20));
  CHECK(marked(m.propagated, 1) == range(12, 22));
  CHECK(marked(m.any, 1) == range(12, 22));
  CHECK(marked(m.propagated, 0).empty());
}

TEST_CASE("decay horizon extends the propagated window") {
  CHECK(decay_horizon(0.0, 0.01) == 0);
  CHECK(decay_horizon(0.5, 0.01) == 7);  // 0.5^7 < 0.01 <= 0.5^6
  CHECK(decay_horizon(-0.9, 0.01) == 44);
  CHECK(std::pow(0.9, 44) < 0.01);
  CHECK(std::pow(0.9, 43) > 0.01);

  const System s = make_system(2, {{0, 1, 0.8, 2}}, 0.5);
  const LabelMasks m = label_endogenous(window(0, 10, 20), s.dag, s.arx, s.alpha, 1000, 2);
  CHECK(marked(m.propagated, 1) == range(12, 29));

  // The horizon is capped at a tenth of the series and the window at n.
  const System slow = make_system(2, {{0, 1, 0.8, 2}}, 0.99);
  const LabelMasks capped = label_endogenous(window(0, 10, 20), slow.dag, slow.arx, slow.alpha, 50, 2);
  CHECK(marked(capped.propagated, 1) == range(12, 27));
  const LabelMasks clipped = label_endogenous(window(0, 40, 50), slow.dag, slow.arx, slow.alpha, 50, 2);
  CHECK(marked(clipped.propagated, 1) == range(42, 50));
}

TEST_CASE("unmixed descendants are not labelled") {
  System s = make_system(3, {{0, 1, 0.8, 1}, {1, 2, 0.8, 1}});
  s.alpha[1] = 0.0;
  const LabelMasks m = label_endogenous(window(0, 10, 20), s.dag, s.arx, s.alpha, 100, 3);
  CHECK(marked(m.propagated, 1).empty());
  // Node 1 never shows the effect, so nothing reaches node 2 either.
  CHECK(marked(m.propagated, 2).empty());

  System zero_gain = make_system(2, {{0, 1, 0.0, 1}});
  CHECK(label_endogenous(window(0, 10, 20), zero_gain.dag, zero_gain.arx, zero_gain.alpha, 100, 2)
            .propagated.cast<int>()
            .sum() == 0);

  LabelPolicy strict;
  strict.alpha_min = 0.6;
  const System s2 = make_system(2, {{0, 1, 0.8, 1}});
  CHECK(label_endogenous(window(0, 10, 20), s2.dag, s2.arx, s2.alpha, 100, 2, strict).propagated.cast<int>().sum() == 0);
}

TEST_CASE("effective lags skip dead edges") {
  System s = make_system(3, {{0, 1, 1.0, 1}, {1, 2, 1.0, 1}, {0, 2, 1.0, 9}});
  CHECK(effective_path_lag(s.dag, s.arx, s.alpha, 0, 0.0).at(2) == 2);
  s.arx.gain[1] = 0.0;
  CHECK(effective_path_lag(s.dag, s.arx, s.alpha, 0, 0.0).at(2) == 9);
  CHECK(min_path_lag(s.dag, s.arx, 0).at(2) == 2);
}

TEST_CASE("merging ORs all three masks") {
  LabelMasks a = label_exogenous(window(0, 0, 5), 20, 2);
  const System s = make_system(2, {{0, 1, 1.0, 0}});
  const LabelMasks b = label_endogenous(window(0, 10, 12), s.dag, s.arx, s.alpha, 20, 2);
  merge_masks(a, b);
  CHECK(a.rootcause.cast<int>().sum() == 7);
  CHECK(a.propagated.cast<int>().sum() == 2);
  CHECK(a.any.cast<int>().sum() == 9);
  CHECK(a.any == a.rootcause.cwiseMax(a.propagated));
  LabelMasks wrong = empty_masks(21, 2);
  CHECK_THROWS_AS(merge_masks(wrong, a), Error);
}

TEST_CASE("labels are sound against simulation") {
  RngStream r(11);
  for (int rep = 0; rep < 100; ++rep) {
    const int d = static_cast<int>(r.uniform_int(2, 6));
    const Index n = 300;
    const Dag dag = sample_dag(d, 0.6, r);
    const ArxParams arx = sample_arx(dag, CausalPriors{}, n, r);
    Eigen::VectorXd alpha(d);
    for (int i = 0; i < d; ++i) alpha[i] = r.bernoulli(0.2) ? 0.0 : r.uniform();
    std::vector<BaselineSeries> bases;
    for (int i = 0; i < d; ++i) {
      Series noise(n);
      for (Index t = 0; t < n; ++t) noise[t] = r.normal();
      bases.push_back(compose_baseline(Series::Zero(n), Series::Zero(n), noise));
    }
    AnomalySpec spec = window(dag.topo_order.front(), 100, 130);
    spec.kind = AnomalyKind::SuddenIncrease;
    spec.params.amplitude = 5.0;
    spec.params.center = 115;
    spec.params.kappa = 0.3;
    const CausalSystem clean = simulate_system(stack_composites(bases), dag, arx, alpha);
    const CausalSystem hit = inject_endogenous(bases, spec, NoSeason{}, dag, arx, alpha);
    const LabelMasks m = label_endogenous(spec, dag, arx, alpha, n, d);
    for (int k = 0; k < d; ++k) {
      if (k == spec.channel) continue;
      // Nothing moves before the first labelled step; unlabelled channels never move.
      Index first = n;
      for (Index t = 0; t < n; ++t)
        if (m.propagated(t, k)) {
          first = t;
          break;
        }
      for (Index t = 0; t < first; ++t) REQUIRE(hit.x(t, k) == clean.x(t, k));
      // The onset of a labelled window is a real deviation.
      if (first < n) REQUIRE(hit.x(first, k) != clean.x(first, k));
    }
  }
}
