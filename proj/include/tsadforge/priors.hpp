#pragma once

// Dataset-level configuration and the per-sample blueprint: every random
// attribute of a sample, drawn up front from the configured priors.

#include "tsadforge/anomaly.hpp"
#include "tsadforge/causal.hpp"
#include "tsadforge/labels.hpp"
#include "tsadforge/rng.hpp"
#include "tsadforge/signal.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace tsadforge {

struct AttributePriors {
  std::array<double, 5> season_weights{0.3, 0.3, 0.05, 0.05, 0.3};  // none sine square triangle wavelet
  std::array<double, 5> trend_weights{0.2, 0.2, 0.2, 0.3, 0.1};     // decrease increase steady multiple arima
  std::array<double, 2> freq_weights{0.5, 0.5};                      // high low
  std::array<double, 4> noise_weights{0.25, 0.25, 0.25, 0.25};      // almost_none low moderate high
};

struct OutputOptions {
  bool z_normalize = false;
  bool emit_clean = false;
};

struct GeneratorConfig {
  std::int64_t num_samples = 100;
  std::array<std::int64_t, 2> length_range{100, 10000};
  double anomalous_ratio = 0.5;
  bool multivariate = false;
  std::array<int, 2> channel_range{2, 50};
  std::uint64_t master_seed = 0;
  AttributePriors attribute_priors;
  CausalPriors causal_priors;
  AnomalyPriors anomaly_priors;
  LabelPolicy label_policy;
  OutputOptions output;
};

/// Every violated invariant, as readable messages; empty means valid.
std::vector<std::string> validate_config(const GeneratorConfig& config);

/// Throws InvalidConfig listing every violation.
void require_valid(const GeneratorConfig& config);

struct ChannelSpec {
  TrendCategory trend_category = TrendCategory::Steady;
  SeasonCategory season_category = SeasonCategory::None;
  FreqRegime freq_regime = FreqRegime::High;
  NoiseLevel noise_level = NoiseLevel::Low;
  TrendSpec trend;
  SeasonSpec season;
  NoiseSpec noise;
};

struct SampleBlueprint {
  std::uint64_t index = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t sub_seed = 0;
  std::int64_t n = 0;
  int d = 0;
  std::vector<ChannelSpec> channels;
  Dag dag;
  ArxParams arx;
  Eigen::VectorXd alphas;
  std::vector<AnomalySpec> anomaly_plan;
};

// Per-component samplers. Each consumes only the stream it is given.
TrendSpec sample_trend_spec(TrendCategory category, std::int64_t n, RngStream& stream);
/// Season period for a frequency regime: high in [8, b], low in [b, max(b, n/4)]
/// with b = max(8, n/20).
double sample_period(FreqRegime regime, std::int64_t n, RngStream& stream);
SeasonSpec sample_season_spec(SeasonCategory category, FreqRegime regime, std::int64_t n, RngStream& stream);
/// sigma0 = level fraction x peak-to-peak of the noiseless trend + season.
NoiseSpec sample_noise_spec(NoiseLevel level, double peak_to_peak, RngStream& level_stream,
                            RngStream& burst_stream, std::int64_t n);

/// Fully draws sample `index`; a pure function of (config, index).
SampleBlueprint sample_blueprint(const GeneratorConfig& config, std::uint64_t index);

}  // namespace tsadforge
