#pragma once

// Univariate context templates: trend, seasonality, noise and their sum.

#include "tsadforge/rng.hpp"
#include "tsadforge/types.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace tsadforge {

enum class TrendCategory { Decrease, Increase, Steady, Multiple, Arima };
enum class SeasonCategory { None, Sine, Square, Triangle, Wavelet };
enum class FreqRegime { High, Low };
enum class NoiseLevel { AlmostNone, Low, Moderate, High };

// ---------------------------------------------------------------- trend

/// ARIMA(p, d, q) with p, q <= 2 and d in {0, 1}; zero initial conditions.
struct ArimaSpec {
  int differencing = 0;
  std::vector<double> ar;  // phi_1..phi_p
  std::vector<double> ma;  // theta_1..theta_q
  double innovation_std = 0.0;
};

/// Deterministic part k0 + k1 t + sum_p delta_p (t - tau_p)_+, optionally
/// blended with a stochastic ARIMA part: (1 - rho) T_det + rho T_stoc.
struct TrendSpec {
  double k0 = 0.0;
  double k1 = 0.0;
  std::vector<std::int64_t> knots;
  std::vector<double> slope_deltas;
  std::optional<ArimaSpec> arima;
  double rho = 0.0;
};

/// True when every root of 1 - sum phi_i z^i lies strictly outside the unit circle.
bool ar_is_stationary(std::span<const double> phi);

Series eval_trend_deterministic(const TrendSpec& spec, Index n);
Series eval_arima(const ArimaSpec& spec, Index n, RngStream& stream);
/// Throws NonStationaryAR, InvalidSpec.
Series eval_trend(const TrendSpec& spec, Index n, RngStream& stream);

// ---------------------------------------------------------------- season

struct NoSeason {};

/// amplitude(t) = A                                    (unmodulated)
///              = (A / order) (1 + depth sin(w t + psi)) (modulated)
struct SineAtom {
  double amplitude = 1.0;
  double frequency = 0.0;  // cycles per sample
  double phase = 0.0;
  int order = 1;  // harmonic index n in the A_n / n modulation
  double mod_depth = 0.0;
  double mod_phase = 0.0;
};

struct SineSeason {
  std::vector<SineAtom> atoms;
  bool modulated = false;
  double mod_frequency = 0.0;  // radians per sample

  /// Base frequency f0 (first atom).
  double base_frequency() const { return atoms.empty() ? 0.0 : atoms.front().frequency; }
};

/// +A on the first duty fraction of each period, -A otherwise; the period
/// starts at cycle_start * period.
struct SquareSeason {
  double amplitude = 1.0;
  double period = 10.0;
  double duty = 0.5;
  double cycle_start = 0.0;
};

/// Ramp from -A up to +A over the first duty fraction of each period, then back
/// down. duty = 0.5 is the symmetric triangle.
struct TriangleSeason {
  double amplitude = 1.0;
  double period = 10.0;
  double duty = 0.5;
  double cycle_start = 0.0;
};

enum class WaveletFamily { Haar, Ricker, Morlet };

struct WaveletAtom {
  double amplitude = 1.0;
  WaveletFamily family = WaveletFamily::Ricker;
  double scale = 1.0;
  double shift = 0.0;
};

/// Periodic train of wavelet atoms: each atom repeats every `period` samples,
/// evaluated at the wrapped offset of t - shift in [-period/2, period/2).
struct WaveletSeason {
  double period = 10.0;
  std::vector<WaveletAtom> atoms;
};

using SeasonSpec = std::variant<NoSeason, SineSeason, SquareSeason, TriangleSeason, WaveletSeason>;

SeasonCategory season_category(const SeasonSpec& spec) noexcept;

double wavelet_value(WaveletFamily family, double u) noexcept;
double season_value(const SeasonSpec& spec, double t) noexcept;
Series eval_season(const SeasonSpec& spec, Index n);
/// Values on [begin, end).
Series eval_season_window(const SeasonSpec& spec, Index begin, Index end);

// ---------------------------------------------------------------- noise

struct VolatilityBurst {
  std::int64_t begin = 0;
  std::int64_t end = 0;
  double multiplier = 0.0;
};

/// sigma(t) = sigma0 * prod_r (1 + multiplier_r [begin_r <= t < end_r]).
struct NoiseSpec {
  double sigma0 = 0.0;
  std::vector<VolatilityBurst> bursts;
};

Series noise_sigma(const NoiseSpec& spec, Index n);
Series eval_noise(const NoiseSpec& spec, Index n, RngStream& stream);

// ---------------------------------------------------------------- composition

struct BaselineSeries {
  Series trend;
  Series season;
  Series noise;
  Series composite;

  Index size() const noexcept { return composite.size(); }
};

/// Throws LengthMismatch.
BaselineSeries compose_baseline(Series trend, Series season, Series noise);

// ---------------------------------------------------------------- names

std::string_view to_string(TrendCategory c) noexcept;
std::string_view to_string(SeasonCategory c) noexcept;
std::string_view to_string(FreqRegime c) noexcept;
std::string_view to_string(NoiseLevel c) noexcept;
std::string_view to_string(WaveletFamily f) noexcept;

/// Accepts haar/ricker/morlet and maps filter-bank names onto them:
/// db/sym -> haar, coif/mexh -> ricker, bior/dmey/morl -> morlet.
std::optional<WaveletFamily> parse_wavelet_family(std::string_view name) noexcept;

}  // namespace tsadforge
