#include "tsadforge/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace tsadforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <std::size_t N>
void check_weights(const std::array<double, N>& w, const char* name, std::vector<std::string>& errors) {
  double sum = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0) {
      errors.push_back(std::string(name) + ": weights must be nonnegative");
      return;
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) errors.push_back(std::string(name) + ": weights must sum to 1");
}

double sign(RngStream& rng) { return rng.bernoulli(0.5) ? 1.0 : -1.0; }

}  // namespace

std::vector<std::string> validate_config(const GeneratorConfig& c) {
  std::vector<std::string> errors;
  if (c.num_samples < 0) errors.emplace_back("num_samples: must be nonnegative");
  if (c.length_range[0] < 1) errors.emplace_back("length_range: min must be at least 1");
  if (c.length_range[0] > c.length_range[1]) errors.emplace_back("length_range: min exceeds max");
  if (!(c.anomalous_ratio >= 0.0 && c.anomalous_ratio <= 1.0))
    errors.emplace_back("anomalous_ratio: must lie in [0, 1]");
  if (c.channel_range[0] < 1) errors.emplace_back("channel_range: min must be at least 1");
  if (c.channel_range[0] > c.channel_range[1]) errors.emplace_back("channel_range: min exceeds max");

  check_weights(c.attribute_priors.season_weights, "season_weights", errors);
  check_weights(c.attribute_priors.trend_weights, "trend_weights", errors);
  check_weights(c.attribute_priors.freq_weights, "freq_weights", errors);
  check_weights(c.attribute_priors.noise_weights, "noise_weights", errors);

  const auto& cp = c.causal_priors;
  if (!(cp.edge_density_target >= 0.0)) errors.emplace_back("edge_density_target: must be nonnegative");
  if (cp.lag_max_cap < 0) errors.emplace_back("lag_max_cap: must be nonnegative");
  if (cp.lag_max_divisor < 1) errors.emplace_back("lag_max_divisor: must be at least 1");
  if (!(cp.a_min >= -0.8 && cp.a_max <= 0.8 && cp.a_min <= cp.a_max))
    errors.emplace_back("arx_a_range: must be an interval inside [-0.8, 0.8]");
  if (!(cp.gain_scale >= 0.0)) errors.emplace_back("gain_scale: must be nonnegative");
  if (!(cp.bias_min <= cp.bias_max)) errors.emplace_back("bias_range: min exceeds max");
  if (!(cp.alpha_min >= 0.0 && cp.alpha_max <= 1.0 && cp.alpha_min <= cp.alpha_max))
    errors.emplace_back("mix_alpha_range: must be an interval inside [0, 1]");

  const auto& ap = c.anomaly_priors;
  if (ap.count_min < 0 || ap.count_min > ap.count_max) errors.emplace_back("anomaly count: need 0 <= min <= max");
  if (!(ap.amplitude_min >= 0.0 && ap.amplitude_min <= ap.amplitude_max))
    errors.emplace_back("amplitude_range: need 0 <= min <= max");
  if (ap.window.min_abs < 1 || ap.window.min_abs > ap.window.max_abs)
    errors.emplace_back("window: need 1 <= min_abs <= max_abs");
  if (!(ap.window.min_frac >= 0.0 && ap.window.min_frac <= ap.window.max_frac && ap.window.max_frac <= 1.0))
    errors.emplace_back("window: need 0 <= min_frac <= max_frac <= 1");
  if (!(ap.endogenous_prob >= 0.0 && ap.endogenous_prob <= 1.0))
    errors.emplace_back("endogenous_prob: must lie in [0, 1]");

  const auto& lp = c.label_policy;
  if (!(lp.epsilon > 0.0 && lp.epsilon < 1.0)) errors.emplace_back("label epsilon: must lie in (0, 1)");
  if (!(lp.alpha_min >= 0.0 && lp.alpha_min <= 1.0)) errors.emplace_back("label alpha_min: must lie in [0, 1]");
  if (!(lp.horizon_cap_frac >= 0.0)) errors.emplace_back("horizon_cap_frac: must be nonnegative");
  return errors;
}

void require_valid(const GeneratorConfig& config) {
  const auto errors = validate_config(config);
  if (errors.empty()) return;
  std::ostringstream msg;
  for (std::size_t i = 0; i < errors.size(); ++i) msg << (i ? "; " : "") << errors[i];
  throw Error(ErrorCode::InvalidConfig, msg.str());
}

// ---------------------------------------------------------------- trend

namespace {

std::vector<double> stationary_ar(int order, RngStream& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> phi(static_cast<std::size_t>(order));
    for (auto& v : phi) v = rng.uniform(-0.5, 0.5);
    if (ar_is_stationary(phi)) return phi;
  }
  return {};
}

ArimaSpec sample_arima(std::int64_t n, RngStream& rng) {
  ArimaSpec a;
  const auto p = static_cast<int>(rng.uniform_int(0, 2));
  const auto q = static_cast<int>(rng.uniform_int(0, 2));
  a.differencing = static_cast<int>(rng.uniform_int(0, 1));
  a.ar = stationary_ar(p, rng);
  a.ma.resize(static_cast<std::size_t>(q));
  for (auto& v : a.ma) v = rng.uniform(-0.5, 0.5);
  a.innovation_std = a.differencing == 1 ? rng.uniform(0.5, 2.0) / std::sqrt(static_cast<double>(n))
                                         : rng.uniform(0.1, 0.5);
  return a;
}

}  // namespace

TrendSpec sample_trend_spec(TrendCategory category, std::int64_t n, RngStream& rng) {
  TrendSpec t;
  const auto nd = static_cast<double>(std::max<std::int64_t>(1, n));
  t.k0 = rng.uniform(-2.0, 2.0);
  const double slope = rng.uniform(1.0, 5.0) / nd;
  switch (category) {
    case TrendCategory::Decrease: t.k1 = -slope; break;
    case TrendCategory::Increase: t.k1 = slope; break;
    case TrendCategory::Steady: t.k1 = 0.0; break;
    case TrendCategory::Multiple: {
      t.k1 = sign(rng) * slope;
      const std::int64_t wanted = rng.uniform_int(1, 4);
      std::set<std::int64_t> knots;
      if (n > 2) {
        const std::int64_t available = std::min<std::int64_t>(wanted, n - 2);
        while (static_cast<std::int64_t>(knots.size()) < available) knots.insert(rng.uniform_int(1, n - 2));
      }
      t.knots.assign(knots.begin(), knots.end());
      for (std::size_t i = 0; i < t.knots.size(); ++i) t.slope_deltas.push_back(sign(rng) * rng.uniform(1.0, 5.0) / nd);
      t.arima = sample_arima(n, rng);
      t.rho = rng.uniform();
      break;
    }
    case TrendCategory::Arima:
      t.k1 = sign(rng) * slope;
      t.arima = sample_arima(n, rng);
      t.rho = rng.uniform();
      break;
  }
  return t;
}

// ---------------------------------------------------------------- season

double sample_period(FreqRegime regime, std::int64_t n, RngStream& rng) {
  const double b = std::max(8.0, static_cast<double>(n) / 20.0);
  if (regime == FreqRegime::High) return rng.uniform(8.0, b);
  return rng.uniform(b, std::max(b, static_cast<double>(n) / 4.0));
}

SeasonSpec sample_season_spec(SeasonCategory category, FreqRegime regime, std::int64_t n, RngStream& rng) {
  if (category == SeasonCategory::None) return NoSeason{};
  const double period = sample_period(regime, n, rng);
  switch (category) {
    case SeasonCategory::Sine: {
      SineSeason s;
      const auto count = rng.uniform_int(1, 3);
      const double f0 = 1.0 / period;
      const double a0 = rng.uniform(0.5, 2.0);
      for (std::int64_t k = 0; k < count; ++k) {
        SineAtom atom;
        atom.order = static_cast<int>(k + 1);
        if (k == 0) {
          atom.amplitude = a0;
          atom.frequency = f0;
        } else {
          atom.amplitude = a0 * rng.uniform(0.1, 0.5);
          atom.frequency = rng.bernoulli(0.7) ? static_cast<double>(k + 1) * f0 : f0 * rng.uniform(1.2, 3.7);
        }
        atom.phase = rng.uniform(0.0, kTwoPi);
        s.atoms.push_back(atom);
      }
      s.modulated = rng.bernoulli(0.3);
      if (s.modulated) {
        s.mod_frequency = kTwoPi / (period * rng.uniform(3.0, 10.0));
        for (auto& atom : s.atoms) {
          atom.mod_depth = rng.uniform(0.0, 0.9);
          atom.mod_phase = rng.uniform(0.0, kTwoPi);
        }
      }
      return s;
    }
    case SeasonCategory::Square: {
      SquareSeason s;
      s.period = period;
      s.amplitude = rng.uniform(0.5, 2.0);
      s.duty = rng.uniform(0.2, 0.8);
      s.cycle_start = rng.uniform();
      return s;
    }
    case SeasonCategory::Triangle: {
      TriangleSeason s;
      s.period = period;
      s.amplitude = rng.uniform(0.5, 2.0);
      s.duty = 0.5;
      s.cycle_start = rng.uniform();
      return s;
    }
    case SeasonCategory::Wavelet: {
      WaveletSeason s;
      s.period = period;
      const auto count = rng.uniform_int(1, 3);
      for (std::int64_t k = 0; k < count; ++k) {
        WaveletAtom atom;
        atom.amplitude = sign(rng) * rng.uniform(0.5, 2.0);
        atom.family = static_cast<WaveletFamily>(rng.uniform_int(0, 2));
        atom.scale = std::max(0.5, rng.uniform(period / 32.0, period / 8.0));
        atom.shift = rng.uniform(0.0, period);
        s.atoms.push_back(atom);
      }
      return s;
    }
    default:
      return NoSeason{};
  }
}

// ---------------------------------------------------------------- noise

NoiseSpec sample_noise_spec(NoiseLevel level, double peak_to_peak, RngStream& level_stream,
                            RngStream& burst_stream, std::int64_t n) {
  static constexpr std::array<std::array<double, 2>, 4> kLevels{{{0.001, 0.01}, {0.01, 0.05}, {0.05, 0.15}, {0.15, 0.4}}};
  const auto& range = kLevels[static_cast<std::size_t>(level)];
  const double fraction = level_stream.uniform(range[0], range[1]);
  const double base = peak_to_peak > 1e-9 ? peak_to_peak : 1.0;

  NoiseSpec spec;
  spec.sigma0 = fraction * base;
  static constexpr std::array<double, 3> kBurstCount{0.7, 0.2, 0.1};
  const std::size_t bursts = burst_stream.categorical(kBurstCount);
  const std::int64_t len_lo = std::max<std::int64_t>(1, n / 50);
  const std::int64_t len_hi = std::max<std::int64_t>(len_lo, n / 10);
  for (std::size_t r = 0; r < bursts; ++r) {
    VolatilityBurst b;
    const std::int64_t len = std::min(n, burst_stream.uniform_int(len_lo, len_hi));
    b.begin = burst_stream.uniform_int(0, n - len);
    b.end = b.begin + len;
    b.multiplier = burst_stream.uniform(0.5, 3.0);
    spec.bursts.push_back(b);
  }
  return spec;
}

// ---------------------------------------------------------------- blueprint

SampleBlueprint sample_blueprint(const GeneratorConfig& config, std::uint64_t index) {
  require_valid(config);
  SampleBlueprint bp;
  bp.index = index;
  bp.master_seed = config.master_seed;
  bp.sub_seed = sample_sub_seed(config.master_seed, index);

  RngStream top = derive_stream(bp.sub_seed, Stage::Blueprint);
  bp.n = top.uniform_int(config.length_range[0], config.length_range[1]);
  bp.d = config.multivariate ? static_cast<int>(top.uniform_int(config.channel_range[0], config.channel_range[1])) : 1;
  const bool anomalous = top.bernoulli(config.anomalous_ratio);
  const std::int64_t count = top.uniform_int(config.anomaly_priors.count_min, config.anomaly_priors.count_max);

  const RngStream trend_root = derive_stream(bp.sub_seed, Stage::Trend);
  const RngStream season_root = derive_stream(bp.sub_seed, Stage::Season);
  const RngStream noise_root = derive_stream(bp.sub_seed, Stage::Noise);
  const RngStream vol_root = derive_stream(bp.sub_seed, Stage::Volatility);
  const auto& ap = config.attribute_priors;

  for (int ch = 0; ch < bp.d; ++ch) {
    const auto c = static_cast<std::uint64_t>(ch);
    ChannelSpec cs;
    cs.season_category = static_cast<SeasonCategory>(top.categorical(ap.season_weights));
    cs.trend_category = static_cast<TrendCategory>(top.categorical(ap.trend_weights));
    cs.freq_regime = static_cast<FreqRegime>(top.categorical(ap.freq_weights));
    cs.noise_level = static_cast<NoiseLevel>(top.categorical(ap.noise_weights));

    RngStream trend_params = trend_root.fork(2 * c);
    cs.trend = sample_trend_spec(cs.trend_category, bp.n, trend_params);
    RngStream season_params = season_root.fork(c);
    cs.season = sample_season_spec(cs.season_category, cs.freq_regime, bp.n, season_params);

    RngStream innovations = trend_root.fork(2 * c + 1);
    const Series signal = eval_trend(cs.trend, bp.n, innovations) + eval_season(cs.season, bp.n);
    const double ptp = signal.size() ? signal.maxCoeff() - signal.minCoeff() : 0.0;
    RngStream level = noise_root.fork(2 * c);
    RngStream bursts = vol_root.fork(c);
    cs.noise = sample_noise_spec(cs.noise_level, ptp, level, bursts, bp.n);
    bp.channels.push_back(std::move(cs));
  }

  const auto& cp = config.causal_priors;
  RngStream dag_stream = derive_stream(bp.sub_seed, Stage::Dag);
  bp.dag = sample_dag(bp.d, edge_probability(bp.d, cp.edge_density_target), dag_stream);
  RngStream arx_stream = derive_stream(bp.sub_seed, Stage::Arx);
  bp.arx = sample_arx(bp.dag, cp, bp.n, arx_stream);
  bp.alphas = Eigen::VectorXd::Zero(bp.d);
  if (bp.d > 1)
    for (int i = 0; i < bp.d; ++i) bp.alphas[i] = arx_stream.uniform(cp.alpha_min, cp.alpha_max);

  if (anomalous) {
    std::vector<ChannelProfile> profiles;
    for (int ch = 0; ch < bp.d; ++ch)
      profiles.push_back({&bp.channels[static_cast<std::size_t>(ch)].season, !bp.dag.children(ch).empty()});
    RngStream anomaly_stream = derive_stream(bp.sub_seed, Stage::Anomaly);
    std::vector<Occupied> occupied;
    for (std::int64_t k = 0; k < count; ++k) {
      auto spec = sample_anomaly_spec(bp.n, profiles, config.anomaly_priors, anomaly_stream, occupied);
      if (!spec) continue;
      occupied.push_back({spec->t_start, spec->t_end});
      bp.anomaly_plan.push_back(std::move(*spec));
    }
  }
  return bp;
}

}  // namespace tsadforge
