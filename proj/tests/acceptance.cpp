// Acceptance checks: one PASS/FAIL line per headline property of the
// generator, its labels and its metrics. Exits nonzero when any check fails.

#include "tsadforge/csv.hpp"
#include "tsadforge/detect.hpp"
#include "tsadforge/metrics.hpp"
#include "tsadforge/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <cstring>

namespace fs = std::filesystem;
using namespace tsadforge;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

GeneratorConfig preset(const std::string& name) {
  return load_config((fs::path(TSADFORGE_SOURCE_DIR) / "configs" / name).string());
}

// ---------------------------------------------------------------- determinism

Outcome determinism() {
  GeneratorConfig c = preset("default.json");
  c.num_samples = 1000;
  const fs::path base = fs::temp_directory_path() / "tsadforge_acceptance";
  fs::remove_all(base);
  auto timed = [&](int workers, const fs::path& dir) {
    const auto t0 = std::chrono::steady_clock::now();
    Json m = generate_dataset(c, 2024, dir.string(), workers);
    return std::make_pair(m, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };
  const auto [m1, s1] = timed(1, base / "w1");
  const auto [m8, s8] = timed(8, base / "w8");

  Outcome o;
  std::size_t same = 0;
  double total_len = 0.0;
  for (std::size_t i = 0; i < m1.at("samples").size(); ++i) {
    same += m1["samples"][i]["digest"] == m8["samples"][i]["digest"];
    total_len += m1["samples"][i]["n"].get<double>();
  }
  // Digests recorded in the manifest must match the files on disk.
  std::size_t verified = 0;
  for (const auto& e : m8.at("samples"))
    verified += digest_sample_dir((base / "w8" / e.at("path").get<std::string>()).string()) == e.at("digest");
  fs::remove_all(base);
  const std::size_t n = m1.at("samples").size();
  o.pass = n == 1000 && same == n && verified == n && s1 < 300.0 && s8 < 300.0;
  o.detail = std::to_string(same) + "/" + std::to_string(n) + " digests equal across workers 1 and 8, " +
             std::to_string(verified) + " verified on disk; mean length " + fmt(total_len / double(n)) + "; " +
             fmt(s1, 3) + " s (1 worker), " + fmt(s8, 3) + " s (8 workers)";
  return o;
}

// ---------------------------------------------------------------- priors

struct Blueprints {
  std::vector<SampleBlueprint> items;
};

const Blueprints& univariate_blueprints() {
  static const Blueprints bps = [] {
    GeneratorConfig c;
    Blueprints out;
    for (std::uint64_t i = 0; i < 10000; ++i) out.items.push_back(sample_blueprint(c, i));
    return out;
  }();
  return bps;
}

Outcome prior_fidelity() {
  const auto& bps = univariate_blueprints().items;
  const AttributePriors priors;
  const double N = static_cast<double>(bps.size());
  constexpr double z = 2.5758293035489;  // two-sided 99%
  Outcome o;
  int checked = 0, inside = 0;
  std::string worst;
  double worst_ratio = 0.0;
  auto check = [&](const std::string& name, double p, int count) {
    const double half = z * std::sqrt(p * (1.0 - p) / N);
    const double freq = count / N;
    ++checked;
    const double ratio = half > 0 ? std::abs(freq - p) / half : (freq == p ? 0.0 : 1e9);
    if (ratio <= 1.0) ++inside;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst = name + " " + fmt(freq) + " vs " + fmt(p);
    }
  };
  std::array<int, 5> season{}, trend{};
  std::array<int, 2> freq{};
  std::array<int, 4> noise{};
  for (const auto& bp : bps) {
    const auto& ch = bp.channels[0];
    ++season[static_cast<std::size_t>(ch.season_category)];
    ++trend[static_cast<std::size_t>(ch.trend_category)];
    ++freq[static_cast<std::size_t>(ch.freq_regime)];
    ++noise[static_cast<std::size_t>(ch.noise_level)];
  }
  for (int k = 0; k < 5; ++k) check(std::string("season:") + std::string(to_string(static_cast<SeasonCategory>(k))), priors.season_weights[k], season[k]);
  for (int k = 0; k < 5; ++k) check(std::string("trend:") + std::string(to_string(static_cast<TrendCategory>(k))), priors.trend_weights[k], trend[k]);
  for (int k = 0; k < 2; ++k) check(std::string("freq:") + std::string(to_string(static_cast<FreqRegime>(k))), priors.freq_weights[k], freq[k]);
  for (int k = 0; k < 4; ++k) check(std::string("noise:") + std::string(to_string(static_cast<NoiseLevel>(k))), priors.noise_weights[k], noise[k]);
  o.pass = inside == checked;
  o.detail = std::to_string(inside) + "/" + std::to_string(checked) + " category frequencies inside their 99% intervals; "
             "largest deviation " + worst + " (" + fmt(worst_ratio, 3) + " half-widths)";
  return o;
}

Outcome length_prior() {
  const auto& bps = univariate_blueprints().items;
  double sum = 0.0;
  std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = 0;
  for (const auto& bp : bps) {
    sum += static_cast<double>(bp.n);
    lo = std::min(lo, bp.n);
    hi = std::max(hi, bp.n);
  }
  const double mean = sum / static_cast<double>(bps.size());
  Outcome o;
  o.pass = std::abs(mean - 5050.0) <= 0.01 * 5050.0 && lo >= 100 && hi <= 10000;
  o.detail = "mean " + fmt(mean, 6) + " over " + std::to_string(bps.size()) + " samples (target 5050 +/- 50.5), range [" +
             std::to_string(lo) + ", " + std::to_string(hi) + "]";
  return o;
}

// ---------------------------------------------------------------- causal

bool kahn_acyclic(int n, const std::vector<Edge>& edges) {
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  for (const auto& e : edges) ++indeg[static_cast<std::size_t>(e.child)];
  std::vector<int> ready;
  for (int v = 0; v < n; ++v)
    if (!indeg[static_cast<std::size_t>(v)]) ready.push_back(v);
  int seen = 0;
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto& e : edges)
      if (e.parent == v && --indeg[static_cast<std::size_t>(e.child)] == 0) ready.push_back(e.child);
  }
  return seen == n;
}

const std::vector<SampleBlueprint>& multivariate_blueprints() {
  static const std::vector<SampleBlueprint> bps = [] {
    GeneratorConfig c = preset("default.json");
    c.length_range = {100, 400};
    c.master_seed = 99;
    std::vector<SampleBlueprint> out;
    for (std::uint64_t i = 0; i < 1000; ++i) out.push_back(sample_blueprint(c, i));
    return out;
  }();
  return bps;
}

Outcome dag_validity() {
  const auto& bps = multivariate_blueprints();
  const double density = CausalPriors{}.edge_density_target;
  int acyclic = 0;
  double edges = 0.0, target = 0.0;
  for (const auto& bp : bps) {
    acyclic += kahn_acyclic(bp.d, bp.dag.edges) && bp.dag.is_valid();
    edges += static_cast<double>(bp.dag.edges.size());
    target += std::min(density * bp.d, 0.5 * bp.d * (bp.d - 1));
  }
  const double mean = edges / double(bps.size()), want = target / double(bps.size());
  Outcome o;
  o.pass = acyclic == static_cast<int>(bps.size()) && std::abs(mean - want) <= 0.1 * want;
  o.detail = std::to_string(acyclic) + "/" + std::to_string(bps.size()) + " acyclic; mean edges " + fmt(mean) +
             " vs target " + fmt(want) + " (density " + fmt(density) + " per node, capped by N(N-1)/2)";
  return o;
}

Outcome arx_stability() {
  const auto& bps = multivariate_blueprints();
  double max_a = 0.0, worst_excess = -std::numeric_limits<double>::infinity();
  int trajectories = 0;
  bool ok = true;
  for (const auto& bp : bps) {
    max_a = std::max(max_a, bp.arx.a.cwiseAbs().maxCoeff());
    // Zero input: baselines 0 and no mixing, so every parent contributes 0.
    const Index n = bp.n;
    const CausalSystem sys = simulate_system(Panel::Zero(n, bp.d), bp.dag, bp.arx, Eigen::VectorXd::Zero(bp.d));
    for (int i = 0; i < bp.d; ++i) {
      const double bound = std::abs(bp.arx.c[i]) / (1.0 - std::abs(bp.arx.a[i])) + 1e-9;
      const double peak = sys.z.col(i).cwiseAbs().maxCoeff();
      worst_excess = std::max(worst_excess, peak - bound);
      ok = ok && peak <= bound && sys.z.col(i).allFinite();
      ++trajectories;
    }
  }
  Outcome o;
  o.pass = ok && max_a <= 0.8;
  o.detail = "max |a| " + fmt(max_a, 6) + "; " + std::to_string(trajectories) +
             " zero-input trajectories, worst peak minus bound " + fmt(worst_excess, 3);
  return o;
}

// ---------------------------------------------------------------- injection

Outcome injection_exactness() {
  RngStream r(7001);
  const SeasonSpec none = NoSeason{};
  AnomalyPriors priors;
  for (int k = 0; k < kNumLocalKinds; ++k) priors.kinds.push_back(static_cast<AnomalyKind>(k));
  int exact = 0, total = 0;
  std::set<AnomalyKind> kinds;
  for (; total < 500; ++total) {
    const Index n = r.uniform_int(200, 3000);
    const int d = static_cast<int>(r.uniform_int(1, 5));
    Panel x(n, d);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = 10.0 * r.normal() + r.uniform(-100.0, 100.0);
    std::vector<ChannelProfile> profiles(static_cast<std::size_t>(d), ChannelProfile{&none, false});
    const auto spec = sample_anomaly_spec(n, profiles, priors, r);
    if (!spec) continue;
    kinds.insert(spec->kind);
    const Panel y = inject_exogenous(x, *spec, {});
    const Series delta = render_delta(*spec, local_context(x.col(spec->channel), *spec));
    bool good = true;
    for (Index c = 0; c < d; ++c)
      for (Index t = 0; t < n; ++t) {
        const bool inside = c == spec->channel && t >= spec->t_start && t < spec->t_end;
        const double want = inside ? x(t, c) + delta[t - spec->t_start] : x(t, c);
        good = good && std::memcmp(&want, &y(t, c), sizeof(double)) == 0;
      }
    exact += good;
  }
  Outcome o;
  o.pass = exact == total;
  o.detail = std::to_string(exact) + "/" + std::to_string(total) +
             " injections bit-identical to x + delta inside the window and to x elsewhere; " +
             std::to_string(kinds.size()) + " local kinds exercised";
  return o;
}

// Every source-to-k path by explicit enumeration.
void enumerate_paths(const SampleBlueprint& bp, int v, std::int64_t lag, std::vector<int>& stack,
                     const std::function<void(int, std::int64_t, const std::vector<int>&)>& visit) {
  for (std::size_t e = 0; e < bp.dag.edges.size(); ++e) {
    if (bp.dag.edges[e].parent != v) continue;
    const int child = bp.dag.edges[e].child;
    stack.push_back(child);
    visit(child, lag + bp.arx.lag[e], stack);
    enumerate_paths(bp, child, lag + bp.arx.lag[e], stack, visit);
    stack.pop_back();
  }
}

Outcome propagation_soundness() {
  GeneratorConfig c = preset("default.json");
  c.length_range = {300, 1500};
  c.anomalous_ratio = 1.0;
  c.anomaly_priors.endogenous_prob = 1.0;
  c.anomaly_priors.count_min = 1;
  c.anomaly_priors.count_max = 1;
  c.master_seed = 4242;

  int injections = 0, sound = 0, zero_gain_clean = 0, labelled_cells = 0;
  double worst_outside = 0.0;
  for (std::uint64_t idx = 0; injections < 500 && idx < 100000; ++idx) {
    const SampleBlueprint bp = sample_blueprint(c, idx);
    if (bp.anomaly_plan.size() != 1 || bp.anomaly_plan[0].mode != InjectionMode::Endogenous) continue;
    ++injections;
    const AnomalySpec& spec = bp.anomaly_plan[0];
    const Sample s = realize_blueprint(bp, c.label_policy);
    const double scale = s.meta.at("context_scales")[0].get<double>();

    // Allowed region: masks, with each reached channel's window stretched from
    // the shortest to the longest path lag plus the decay tails of every node
    // on a live path.
    const Index n = bp.n;
    Mask allowed = s.masks.any;
    std::map<int, std::pair<std::int64_t, std::int64_t>> lag_span;
    std::map<int, std::int64_t> tail;
    std::vector<int> stack;
    enumerate_paths(bp, spec.channel, 0, stack, [&](int k, std::int64_t lag, const std::vector<int>& path) {
      std::int64_t t = 0;
      for (int v : path) t += decay_horizon(bp.arx.a[v], 1e-12);
      auto [it, fresh] = lag_span.try_emplace(k, lag, lag);
      if (!fresh) it->second = {std::min(it->second.first, lag), std::max(it->second.second, lag)};
      tail[k] = std::max(tail[k], t);
    });
    for (const auto& [k, span] : lag_span)
      for (Index t = spec.t_start + span.first; t < std::min<Index>(n, spec.t_end + span.second + tail[k]); ++t)
        allowed(t, k) = 1;

    bool ok = true;
    for (Index k = 0; k < bp.d; ++k)
      for (Index t = 0; t < n; ++t) {
        const double dev = std::abs(s.values(t, k) - s.clean(t, k));
        labelled_cells += s.masks.any(t, k);
        if (dev > 1e-9 * scale && !allowed(t, k)) {
          ok = false;
          worst_outside = std::max(worst_outside, dev / scale);
        }
      }
    sound += ok;

    SampleBlueprint cut = bp;
    std::fill(cut.arx.gain.begin(), cut.arx.gain.end(), 0.0);
    const Sample z = realize_blueprint(cut, c.label_policy);
    bool quiet = true;
    for (Index k = 0; k < bp.d; ++k)
      if (k != spec.channel) quiet = quiet && (z.values.col(k).array() == z.clean.col(k).array()).all();
    zero_gain_clean += quiet;
  }
  Outcome o;
  o.pass = injections == 500 && sound == injections && zero_gain_clean == injections;
  o.detail = std::to_string(sound) + "/" + std::to_string(injections) +
             " endogenous injections with every deviation > 1e-9 scale inside the extended masks (worst outside " +
             fmt(worst_outside, 3) + " scale); " + std::to_string(zero_gain_clean) + "/" + std::to_string(injections) +
             " with zero gains leave every other channel untouched";
  return o;
}

// ---------------------------------------------------------------- metrics

double brute_vus(const Series& scores, const MaskSeries& labels, Index L) {
  std::vector<std::pair<Index, Index>> ev;
  for (Index t = 0; t < labels.size(); ++t) {
    if (labels[t] && (t == 0 || !labels[t - 1])) ev.push_back({t, t});
    if (labels[t]) ev.back().second = t;
  }
  std::vector<double> thresholds(scores.data(), scores.data() + scores.size());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double sum = 0.0;
  for (Index l = 0; l <= L; ++l) {
    std::vector<double> w(static_cast<std::size_t>(labels.size()), 0.0);
    for (Index t = 0; t < labels.size(); ++t)
      for (auto [b, e] : ev) {
        const Index dist = t < b ? b - t : (t > e ? t - e : 0);
        if (dist <= l) w[static_cast<std::size_t>(t)] = std::max(w[static_cast<std::size_t>(t)], 1.0 - double(dist) / double(l + 1));
      }
    double total = 0.0;
    for (double v : w) total += v;
    double area = 0.0, prev = 0.0;
    for (double th : thresholds) {
      double tp = 0.0, fp = 0.0;
      for (Index t = 0; t < scores.size(); ++t)
        if (scores[t] >= th) tp += w[static_cast<std::size_t>(t)], fp += 1.0 - w[static_cast<std::size_t>(t)];
      area += (tp / total - prev) * tp / (tp + fp);
      prev = tp / total;
    }
    sum += area;
  }
  return sum / double(L + 1);
}

Outcome metric_oracles() {
  RngStream r(9001);
  int f1_exact = 0;
  for (int i = 0; i < 1000; ++i) {
    const Index n = r.uniform_int(1, 500);
    MaskSeries pred(n), labels(n);
    const double pp = r.uniform(), pl = r.uniform();
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (Index t = 0; t < n; ++t) {
      pred[t] = r.bernoulli(pp);
      labels[t] = r.bernoulli(pl);
      if (pred[t] && labels[t]) ++tp;
      if (pred[t] && !labels[t]) ++fp;
      if (!pred[t] && labels[t]) ++fn;
    }
    const double p = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    const double rc = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    const double f = tp ? double(2 * tp) / double(2 * tp + fp + fn) : 0.0;
    const BinaryScore s = standard_f1(pred, labels);
    f1_exact += s.tp == tp && s.fp == fp && s.fn == fn && s.precision == p && s.recall == rc && s.f1 == f;
  }

  const Index n = 200;
  MaskSeries labels = MaskSeries::Zero(n);
  for (Index t = 40; t < 52; ++t) labels[t] = 1;
  for (Index t = 120; t < 123; ++t) labels[t] = 1;
  labels[170] = 1;
  Series scores(n);
  for (Index t = 0; t < n; ++t) scores[t] = std::round((r.normal() + 2.0 * labels[t]) * 8.0) / 8.0;
  double worst_vus = 0.0;
  for (Index L : {Index{0}, Index{5}, Index{20}}) worst_vus = std::max(worst_vus, std::abs(vus_pr(scores, labels, L) - brute_vus(scores, labels, L)));

  const Series perfect = labels.cast<double>();
  const double perfect_min =
      std::min({standard_f1(labels, labels).f1, f1_t(labels, labels).f1, affiliation_f(labels, labels).f1,
                vus_pr(perfect, labels, 0), best_f1_over_thresholds(perfect, labels, 100).score.f1});

  Outcome o;
  o.pass = f1_exact == 1000 && worst_vus <= 1e-9 && perfect_min == 1.0;
  o.detail = std::to_string(f1_exact) + "/1000 standard_f1 instances identical to naive counts; VUS-PR vs brute force max |diff| " +
             fmt(worst_vus, 3) + " on 200 points; minimum metric on perfect predictions " + fmt(perfect_min);
  return o;
}

// ---------------------------------------------------------------- detectors

struct DetectorMeans {
  double zscore = 0.0;
  double rcd = 0.0;
  int samples = 0;
};

DetectorMeans mean_best_f1(const GeneratorConfig& c, bool run_zscore, bool run_rcd) {
  DetectorMeans m;
  for (std::int64_t i = 0; i < c.num_samples; ++i) {
    const Sample s = generate_sample(c, c.master_seed, static_cast<std::uint64_t>(i));
    const MaskSeries labels = flatten_any(s.masks.any);
    if (labels.sum() == 0) continue;
    ++m.samples;
    // Exhaustive sweep: one candidate threshold per distinct score.
    const int grid = static_cast<int>(labels.size());
    if (run_zscore) m.zscore += best_f1_over_thresholds(detect(s.values, DetectorKind::ZScore), labels, grid).score.f1;
    if (run_rcd)
      m.rcd += best_f1_over_thresholds(detect(s.values, DetectorKind::ContextDiscrepancy), labels, grid).score.f1;
  }
  if (m.samples) {
    m.zscore /= m.samples;
    m.rcd /= m.samples;
  }
  return m;
}

Outcome end_to_end() {
  const DetectorMeans spike = mean_best_f1(preset("e2e_spike.json"), true, false);
  const DetectorMeans shift = mean_best_f1(preset("e2e_level_shift.json"), true, true);
  Outcome o;
  o.pass = spike.samples == 200 && spike.zscore >= 0.8 && shift.rcd > shift.zscore;
  o.detail = "up_spike: zscore mean best-threshold F1 " + fmt(spike.zscore) + " over " + std::to_string(spike.samples) +
             " samples (need >= 0.8); sudden_increase: rcd " + fmt(shift.rcd) + " vs zscore " + fmt(shift.zscore);
  return o;
}

Outcome contextual_vs_point() {
  const DetectorMeans point = mean_best_f1(preset("point_anomalies.json"), true, true);
  const DetectorMeans ctx = mean_best_f1(preset("contextual_anomalies.json"), true, true);
  Outcome o;
  o.pass = point.samples > 0 && ctx.samples > 0 && ctx.rcd > ctx.zscore;
  o.detail = "contextual set: rcd " + fmt(ctx.rcd) + " vs zscore " + fmt(ctx.zscore) + " (" + std::to_string(ctx.samples) +
             " samples); point set: rcd " + fmt(point.rcd) + " vs zscore " + fmt(point.zscore);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"determinism", determinism},
      {"prior-fidelity", prior_fidelity},
      {"length-prior", length_prior},
      {"dag-validity", dag_validity},
      {"arx-stability", arx_stability},
      {"injection-exactness", injection_exactness},
      {"propagation-soundness", propagation_soundness},
      {"metric-oracles", metric_oracles},
      {"end-to-end", end_to_end},
      {"contextual-vs-point", contextual_vs_point},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
