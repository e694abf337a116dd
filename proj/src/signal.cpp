#include "tsadforge/signal.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tsadforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double u) noexcept { return u - std::floor(u); }

}  // namespace

// ---------------------------------------------------------------- trend

bool ar_is_stationary(std::span<const double> phi) {
  const auto p = static_cast<Index>(phi.size());
  if (p == 0) return true;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (Index i = 0; i < p; ++i) companion(0, i) = phi[static_cast<std::size_t>(i)];
  if (p > 1) companion.bottomLeftCorner(p - 1, p - 1).setIdentity();
  const Eigen::VectorXcd roots = companion.eigenvalues();
  return roots.cwiseAbs().maxCoeff() < 1.0 - 1e-12;
}

Series eval_trend_deterministic(const TrendSpec& spec, Index n) {
  Series out(n);
  for (Index t = 0; t < n; ++t) {
    const double td = static_cast<double>(t);
    double v = spec.k0 + spec.k1 * td;
    for (std::size_t p = 0; p < spec.knots.size(); ++p) {
      const auto tau = static_cast<double>(spec.knots[p]);
      if (td > tau) v += spec.slope_deltas[p] * (td - tau);
    }
    out[t] = v;
  }
  return out;
}

Series eval_arima(const ArimaSpec& spec, Index n, RngStream& stream) {
  if (spec.ar.size() > 2 || spec.ma.size() > 2 || spec.differencing < 0 || spec.differencing > 1)
    throw Error(ErrorCode::InvalidSpec, "arima orders must satisfy p, q <= 2 and d in {0, 1}");
  if (!ar_is_stationary(spec.ar))
    throw Error(ErrorCode::NonStationaryAR, "AR polynomial has a root on or inside the unit circle");

  Series innovations(n);
  for (Index t = 0; t < n; ++t) innovations[t] = spec.innovation_std * stream.normal();

  Series w = Series::Zero(n);
  for (Index t = 0; t < n; ++t) {
    double v = innovations[t];
    for (std::size_t i = 0; i < spec.ar.size(); ++i) {
      const Index lag = t - 1 - static_cast<Index>(i);
      if (lag >= 0) v += spec.ar[i] * w[lag];
    }
    for (std::size_t j = 0; j < spec.ma.size(); ++j) {
      const Index lag = t - 1 - static_cast<Index>(j);
      if (lag >= 0) v += spec.ma[j] * innovations[lag];
    }
    w[t] = v;
  }
  if (spec.differencing == 1) {
    double acc = 0.0;
    for (Index t = 0; t < n; ++t) {
      acc += w[t];
      w[t] = acc;
    }
  }
  return w;
}

Series eval_trend(const TrendSpec& spec, Index n, RngStream& stream) {
  if (spec.knots.size() != spec.slope_deltas.size())
    throw Error(ErrorCode::InvalidSpec, "piecewise trend needs one slope delta per knot");
  for (std::size_t p = 0; p < spec.knots.size(); ++p) {
    const bool ordered = p == 0 || spec.knots[p - 1] < spec.knots[p];
    if (spec.knots[p] <= 0 || spec.knots[p] >= n || !ordered)
      throw Error(ErrorCode::InvalidSpec, "knots must satisfy 0 < tau_1 < ... < tau_P < n");
  }
  if (spec.rho < 0.0 || spec.rho > 1.0) throw Error(ErrorCode::InvalidSpec, "rho_T must lie in [0, 1]");

  Series det = eval_trend_deterministic(spec, n);
  if (!spec.arima) return det;
  const Series stoc = eval_arima(*spec.arima, n, stream);
  return ((1.0 - spec.rho) * det.array() + spec.rho * stoc.array()).matrix();
}

// ---------------------------------------------------------------- season

SeasonCategory season_category(const SeasonSpec& spec) noexcept {
  return static_cast<SeasonCategory>(spec.index());
}

double wavelet_value(WaveletFamily family, double u) noexcept {
  switch (family) {
    case WaveletFamily::Haar:
      if (u >= 0.0 && u < 0.5) return 1.0;
      if (u >= 0.5 && u < 1.0) return -1.0;
      return 0.0;
    case WaveletFamily::Ricker:
      return (1.0 - u * u) * std::exp(-0.5 * u * u);
    case WaveletFamily::Morlet:
      return std::cos(5.0 * u) * std::exp(-0.5 * u * u);
  }
  return 0.0;
}

namespace {

struct SeasonEvaluator {
  double t;

  double operator()(const NoSeason&) const noexcept { return 0.0; }

  double operator()(const SineSeason& s) const noexcept {
    double v = 0.0;
    for (const auto& atom : s.atoms) {
      double amp = atom.amplitude;
      if (s.modulated)
        amp = atom.amplitude / atom.order * (1.0 + atom.mod_depth * std::sin(s.mod_frequency * t + atom.mod_phase));
      v += amp * std::sin(kTwoPi * atom.frequency * t + atom.phase);
    }
    return v;
  }

  double operator()(const SquareSeason& s) const noexcept {
    const double u = frac(t / s.period - s.cycle_start);
    return u < s.duty ? s.amplitude : -s.amplitude;
  }

  double operator()(const TriangleSeason& s) const noexcept {
    const double u = frac(t / s.period - s.cycle_start);
    const double a = s.amplitude;
    if (s.duty <= 0.0) return a - 2.0 * a * u;
    if (s.duty >= 1.0) return -a + 2.0 * a * u;
    if (u < s.duty) return -a + 2.0 * a * u / s.duty;
    return a - 2.0 * a * (u - s.duty) / (1.0 - s.duty);
  }

  double operator()(const WaveletSeason& s) const noexcept {
    double v = 0.0;
    for (const auto& atom : s.atoms) {
      double r = t - atom.shift;
      r -= s.period * std::floor(r / s.period + 0.5);
      v += atom.amplitude * wavelet_value(atom.family, r / atom.scale);
    }
    return v;
  }
};

}  // namespace

double season_value(const SeasonSpec& spec, double t) noexcept {
  return std::visit(SeasonEvaluator{t}, spec);
}

Series eval_season_window(const SeasonSpec& spec, Index begin, Index end) {
  Series out(std::max<Index>(0, end - begin));
  for (Index t = begin; t < end; ++t) out[t - begin] = season_value(spec, static_cast<double>(t));
  return out;
}

Series eval_season(const SeasonSpec& spec, Index n) {
  if (std::holds_alternative<NoSeason>(spec)) return Series::Zero(n);
  return eval_season_window(spec, 0, n);
}

// ---------------------------------------------------------------- noise

Series noise_sigma(const NoiseSpec& spec, Index n) {
  Series sigma = Series::Constant(n, spec.sigma0);
  for (const auto& burst : spec.bursts) {
    const Index b = std::clamp<Index>(burst.begin, 0, n);
    const Index e = std::clamp<Index>(burst.end, 0, n);
    for (Index t = b; t < e; ++t) sigma[t] *= 1.0 + burst.multiplier;
  }
  return sigma;
}

Series eval_noise(const NoiseSpec& spec, Index n, RngStream& stream) {
  const Series sigma = noise_sigma(spec, n);
  Series out(n);
  for (Index t = 0; t < n; ++t) out[t] = sigma[t] * stream.normal();
  return out;
}

// ---------------------------------------------------------------- composition

BaselineSeries compose_baseline(Series trend, Series season, Series noise) {
  if (trend.size() != season.size() || trend.size() != noise.size())
    throw Error(ErrorCode::LengthMismatch, "trend, season and noise must have equal length");
  BaselineSeries out;
  out.composite = trend + season + noise;
  out.trend = std::move(trend);
  out.season = std::move(season);
  out.noise = std::move(noise);
  return out;
}

// ---------------------------------------------------------------- names

std::string_view to_string(TrendCategory c) noexcept {
  switch (c) {
    case TrendCategory::Decrease: return "decrease";
    case TrendCategory::Increase: return "increase";
    case TrendCategory::Steady: return "steady";
    case TrendCategory::Multiple: return "multiple";
    case TrendCategory::Arima: return "arima";
  }
  return "";
}

std::string_view to_string(SeasonCategory c) noexcept {
  switch (c) {
    case SeasonCategory::None: return "none";
    case SeasonCategory::Sine: return "sine";
    case SeasonCategory::Square: return "square";
    case SeasonCategory::Triangle: return "triangle";
    case SeasonCategory::Wavelet: return "wavelet";
  }
  return "";
}

std::string_view to_string(FreqRegime c) noexcept {
  return c == FreqRegime::High ? "high" : "low";
}

std::string_view to_string(NoiseLevel c) noexcept {
  switch (c) {
    case NoiseLevel::AlmostNone: return "almost_none";
    case NoiseLevel::Low: return "low";
    case NoiseLevel::Moderate: return "moderate";
    case NoiseLevel::High: return "high";
  }
  return "";
}

std::string_view to_string(WaveletFamily f) noexcept {
  switch (f) {
    case WaveletFamily::Haar: return "haar";
    case WaveletFamily::Ricker: return "ricker";
    case WaveletFamily::Morlet: return "morlet";
  }
  return "";
}

std::optional<WaveletFamily> parse_wavelet_family(std::string_view name) noexcept {
  auto starts = [&](std::string_view prefix) { return name.substr(0, prefix.size()) == prefix; };
  if (name == "haar" || starts("db") || starts("sym")) return WaveletFamily::Haar;
  if (name == "ricker" || name == "mexh" || starts("coif")) return WaveletFamily::Ricker;
  if (name == "morlet" || name == "morl" || name == "dmey" || starts("bior")) return WaveletFamily::Morlet;
  return std::nullopt;
}

}  // namespace tsadforge
