#include "tsadforge/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tsadforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr std::array<std::string_view, kNumAnomalyKinds> kKindNames = {
    "up_spike",
    "down_spike",
    "cont_up_spikes",
    "cont_down_spikes",
    "wide_up_spike",
    "wide_down_spike",
    "outlier",
    "sudden_increase",
    "sudden_decrease",
    "plateau_convex",
    "plateau_concave",
    "rapid_rise_slow_decline",
    "slow_rise_rapid_decline",
    "rapid_decline_slow_rise",
    "slow_decline_rapid_rise",
    "decrease_after_up_spike",
    "increase_after_down_spike",
    "increase_after_up_spike",
    "decrease_after_down_spike",
    "shake",
    "inversion",
    "amplitude_scaling",
    "frequency_change",
    "noise_injection",
    "waveform_change",
    "phase_shift",
    "add_harmonic",
    "remove_harmonic",
    "modify_harmonic_phase",
    "modify_amp_mod_depth",
    "modify_mod_frequency",
    "modify_mod_phase",
    "pulse_shift",
    "pulse_width_mod",
    "wavelet_family_change",
    "wavelet_scale_change",
    "wavelet_shift_change",
    "wavelet_amplitude_change",
    "add_wavelet",
    "remove_wavelet",
};

double triangle_bump(std::int64_t t, std::int64_t center, std::int64_t width) noexcept {
  const double dist = std::abs(static_cast<double>(t - center));
  return std::max(1.0 - dist / static_cast<double>(width), 0.0);
}

double logistic(double u) noexcept {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

bool is_spike_scaled(AnomalyKind k) noexcept {
  switch (k) {
    case AnomalyKind::UpSpike:
    case AnomalyKind::DownSpike:
    case AnomalyKind::ContUpSpikes:
    case AnomalyKind::ContDownSpikes:
    case AnomalyKind::DecreaseAfterUpSpike:
    case AnomalyKind::IncreaseAfterDownSpike:
    case AnomalyKind::IncreaseAfterUpSpike:
    case AnomalyKind::DecreaseAfterDownSpike:
      return true;
    default:
      return false;
  }
}

std::int64_t min_window(AnomalyKind k) noexcept {
  switch (k) {
    case AnomalyKind::Outlier:
    case AnomalyKind::UpSpike:
    case AnomalyKind::DownSpike:
      return 1;
    case AnomalyKind::DecreaseAfterUpSpike:
    case AnomalyKind::IncreaseAfterDownSpike:
    case AnomalyKind::IncreaseAfterUpSpike:
    case AnomalyKind::DecreaseAfterDownSpike:
    case AnomalyKind::ContUpSpikes:
    case AnomalyKind::ContDownSpikes:
      return 3;
    default:
      return 2;
  }
}

double wrap_unit(double u) noexcept { return u - std::floor(u); }

}  // namespace

std::string_view to_string(AnomalyKind k) noexcept { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<AnomalyKind> parse_anomaly_kind(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == name) return static_cast<AnomalyKind>(i);
  return std::nullopt;
}

std::array<AnomalyKind, kNumAnomalyKinds> all_anomaly_kinds() noexcept {
  std::array<AnomalyKind, kNumAnomalyKinds> out{};
  for (int i = 0; i < kNumAnomalyKinds; ++i) out[static_cast<std::size_t>(i)] = static_cast<AnomalyKind>(i);
  return out;
}

std::string_view to_string(InjectionMode m) noexcept {
  return m == InjectionMode::Exogenous ? "exogenous" : "endogenous";
}

bool kind_compatible(AnomalyKind kind, const SeasonSpec& season) noexcept {
  if (is_local(kind)) return true;
  const SeasonCategory cat = season_category(season);
  const auto* sine = std::get_if<SineSeason>(&season);
  const auto* wavelet = std::get_if<WaveletSeason>(&season);
  switch (kind) {
    case AnomalyKind::Inversion:
    case AnomalyKind::AmplitudeScaling:
    case AnomalyKind::FrequencyChange:
    case AnomalyKind::NoiseInjection:
      return cat != SeasonCategory::None;
    case AnomalyKind::WaveformChange:
    case AnomalyKind::PhaseShift:
    case AnomalyKind::AddHarmonic:
    case AnomalyKind::RemoveHarmonic:
    case AnomalyKind::ModifyHarmonicPhase:
      return sine && !sine->atoms.empty();
    case AnomalyKind::ModifyAmpModDepth:
    case AnomalyKind::ModifyModFrequency:
    case AnomalyKind::ModifyModPhase:
      return sine && !sine->atoms.empty() && sine->modulated;
    case AnomalyKind::PulseShift:
    case AnomalyKind::PulseWidthMod:
      return cat == SeasonCategory::Square || cat == SeasonCategory::Triangle;
    case AnomalyKind::WaveletFamilyChange:
    case AnomalyKind::WaveletScaleChange:
    case AnomalyKind::WaveletShiftChange:
    case AnomalyKind::WaveletAmplitudeChange:
    case AnomalyKind::RemoveWavelet:
      return wavelet && !wavelet->atoms.empty();
    case AnomalyKind::AddWavelet:
      return wavelet != nullptr;
    default:
      return false;
  }
}

ChannelContext local_context(const Series& channel, const AnomalySpec& spec) {
  const std::int64_t width = is_spike_scaled(spec.kind) ? spec.params.half_width : spec.length();
  const std::int64_t span = std::max<std::int64_t>(kMinContextPoints, 5 * std::max<std::int64_t>(1, width));
  const std::int64_t lo = std::max<std::int64_t>(0, spec.t_start - span);
  auto stddev = [](const auto& seg) {
    const double mean = seg.mean();
    return std::sqrt((seg.array() - mean).square().mean());
  };
  double sd = 0.0;
  if (spec.t_start - lo >= 2)
    sd = stddev(channel.segment(lo, spec.t_start - lo));
  else if (channel.size() >= 2)
    sd = stddev(channel);
  if (!(sd > 0.0) || !std::isfinite(sd)) sd = 1.0;
  return {sd};
}

Series render_delta(const AnomalySpec& spec, const ChannelContext& context) {
  if (!is_local(spec.kind))
    throw Error(ErrorCode::KindMismatch, std::string("render_delta needs a local kind, got ") +
                                             std::string(to_string(spec.kind)));
  const auto& p = spec.params;
  const std::int64_t ts = spec.t_start;
  const std::int64_t te = spec.t_end;
  const double a = p.amplitude * context.scale;
  const double b = p.level_shift * context.scale;

  Series out = Series::Zero(std::max<std::int64_t>(0, te - ts));
  for (std::int64_t t = ts; t < te; ++t) {
    const double td = static_cast<double>(t);
    double v = 0.0;
    switch (spec.kind) {
      case AnomalyKind::UpSpike:
        v = a * triangle_bump(t, p.center, p.half_width);
        break;
      case AnomalyKind::DownSpike:
        v = -a * triangle_bump(t, p.center, p.half_width);
        break;
      case AnomalyKind::ContUpSpikes:
      case AnomalyKind::ContDownSpikes: {
        const double sign = spec.kind == AnomalyKind::ContUpSpikes ? 1.0 : -1.0;
        for (std::size_t m = 0; m < p.spike_amplitudes.size(); ++m) {
          const std::int64_t c = p.center + static_cast<std::int64_t>(m) * p.stride;
          v += sign * p.spike_amplitudes[m] * context.scale * triangle_bump(t, c, p.spike_widths[m]);
        }
        break;
      }
      case AnomalyKind::WideUpSpike:
      case AnomalyKind::WideDownSpike: {
        const double amp = spec.kind == AnomalyKind::WideUpSpike ? a : -a;
        if (t < ts + p.rise)
          v = amp * static_cast<double>(t - ts) / static_cast<double>(p.rise);
        else if (t < te - p.fall)
          v = amp;
        else
          v = amp * (1.0 - static_cast<double>(t - (te - p.fall)) / static_cast<double>(p.fall));
        break;
      }
      case AnomalyKind::Outlier:
        v = t == p.center ? a : 0.0;
        break;
      case AnomalyKind::SuddenIncrease:
        v = a * logistic(p.kappa * static_cast<double>(t - p.center));
        break;
      case AnomalyKind::SuddenDecrease:
        v = -a * logistic(p.kappa * static_cast<double>(t - p.center));
        break;
      case AnomalyKind::PlateauConvex:
      case AnomalyKind::PlateauConcave: {
        const double sign = spec.kind == AnomalyKind::PlateauConvex ? 1.0 : -1.0;
        v = sign * a * 0.5 *
            (1.0 - std::cos(std::numbers::pi * static_cast<double>(t - ts) / static_cast<double>(te - ts)));
        break;
      }
      case AnomalyKind::RapidRiseSlowDecline:
      case AnomalyKind::SlowRiseRapidDecline:
      case AnomalyKind::RapidDeclineSlowRise:
      case AnomalyKind::SlowDeclineRapidRise: {
        const bool rising = spec.kind == AnomalyKind::RapidRiseSlowDecline ||
                            spec.kind == AnomalyKind::SlowRiseRapidDecline;
        const double amp = rising ? a : -a;
        if (t < p.peak)
          v = amp * (1.0 - std::exp(-static_cast<double>(t - ts) / static_cast<double>(p.rise)));
        else
          v = amp * std::exp(-static_cast<double>(t - p.peak) / static_cast<double>(p.fall));
        break;
      }
      case AnomalyKind::DecreaseAfterUpSpike:
      case AnomalyKind::IncreaseAfterDownSpike:
      case AnomalyKind::IncreaseAfterUpSpike:
      case AnomalyKind::DecreaseAfterDownSpike: {
        const bool up_spike = spec.kind == AnomalyKind::DecreaseAfterUpSpike ||
                              spec.kind == AnomalyKind::IncreaseAfterUpSpike;
        const bool increase = spec.kind == AnomalyKind::IncreaseAfterDownSpike ||
                              spec.kind == AnomalyKind::IncreaseAfterUpSpike;
        v = (up_spike ? a : -a) * triangle_bump(t, p.center, p.half_width);
        if (t >= p.shift_start) v += increase ? b : -b;
        break;
      }
      case AnomalyKind::Shake:
        v = a * std::sin(kTwoPi * p.frequency * td + p.phase);
        break;
      default:
        break;
    }
    out[t - ts] = v;
  }
  return out;
}

namespace {

struct SeasonMutator {
  const AnomalySpec& spec;

  [[noreturn]] void mismatch() const {
    throw Error(ErrorCode::KindMismatch,
                std::string(to_string(spec.kind)) + " does not apply to this seasonality");
  }

  SeasonSpec operator()(const NoSeason&) const { mismatch(); }

  SeasonSpec operator()(SineSeason s) const {
    const auto& p = spec.params;
    auto atom_at = [&](int idx) -> SineAtom& {
      if (s.atoms.empty()) mismatch();
      return s.atoms[static_cast<std::size_t>(idx) % s.atoms.size()];
    };
    switch (spec.kind) {
      case AnomalyKind::Inversion:
        for (auto& atom : s.atoms) atom.amplitude = -atom.amplitude;
        return s;
      case AnomalyKind::AmplitudeScaling:
        for (auto& atom : s.atoms) atom.amplitude *= p.ratio;
        return s;
      case AnomalyKind::FrequencyChange:
        for (auto& atom : s.atoms) atom.frequency /= p.period_multiplier;
        return s;
      case AnomalyKind::NoiseInjection:
        return s;
      case AnomalyKind::WaveformChange: {
        const SineAtom& base = atom_at(0);
        const double period = 1.0 / base.frequency;
        const double offset = base.phase / kTwoPi;
        if (p.target_waveform == SeasonCategory::Triangle)
          return TriangleSeason{base.amplitude, period, 0.5, wrap_unit(-0.25 - offset)};
        return SquareSeason{base.amplitude, period, 0.5, wrap_unit(-offset)};
      }
      case AnomalyKind::PhaseShift:
        for (auto& atom : s.atoms) atom.phase += p.phase_shift;
        return s;
      case AnomalyKind::AddHarmonic: {
        const SineAtom& base = atom_at(0);
        SineAtom h;
        h.amplitude = p.harmonic_amplitude * std::abs(base.amplitude);
        h.frequency = p.harmonic_order * base.frequency;
        h.phase = p.harmonic_phase;
        h.order = p.harmonic_order;
        s.atoms.push_back(h);
        return s;
      }
      case AnomalyKind::RemoveHarmonic:
        if (s.atoms.empty()) mismatch();
        s.atoms.erase(s.atoms.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(p.harmonic_index) % s.atoms.size()));
        return s;
      case AnomalyKind::ModifyHarmonicPhase:
        atom_at(p.harmonic_index).phase = p.new_value;
        return s;
      case AnomalyKind::ModifyAmpModDepth:
        if (!s.modulated) mismatch();
        atom_at(p.harmonic_index).mod_depth = p.new_value;
        return s;
      case AnomalyKind::ModifyModFrequency:
        if (!s.modulated) mismatch();
        s.mod_frequency = p.new_value;
        return s;
      case AnomalyKind::ModifyModPhase:
        if (!s.modulated) mismatch();
        atom_at(p.harmonic_index).mod_phase = p.new_value;
        return s;
      default:
        mismatch();
    }
  }

  template <typename Pulse>
  SeasonSpec pulse(Pulse s) const {
    const auto& p = spec.params;
    switch (spec.kind) {
      case AnomalyKind::Inversion: s.amplitude = -s.amplitude; return s;
      case AnomalyKind::AmplitudeScaling: s.amplitude *= p.ratio; return s;
      case AnomalyKind::FrequencyChange: s.period *= p.period_multiplier; return s;
      case AnomalyKind::NoiseInjection: return s;
      case AnomalyKind::PulseShift: s.cycle_start = wrap_unit(s.cycle_start + p.cycle_shift); return s;
      case AnomalyKind::PulseWidthMod: s.duty = std::clamp(p.duty_scale * s.duty, 0.0, 1.0); return s;
      default: mismatch();
    }
  }

  SeasonSpec operator()(const SquareSeason& s) const { return pulse(s); }
  SeasonSpec operator()(const TriangleSeason& s) const { return pulse(s); }

  SeasonSpec operator()(WaveletSeason s) const {
    const auto& p = spec.params;
    auto for_selected = [&](auto&& fn) {
      if (s.atoms.empty()) mismatch();
      if (p.atom_index < 0) {
        for (auto& atom : s.atoms) fn(atom);
      } else {
        fn(s.atoms[static_cast<std::size_t>(p.atom_index) % s.atoms.size()]);
      }
    };
    switch (spec.kind) {
      case AnomalyKind::Inversion:
        for (auto& atom : s.atoms) atom.amplitude = -atom.amplitude;
        return s;
      case AnomalyKind::AmplitudeScaling:
        for (auto& atom : s.atoms) atom.amplitude *= p.ratio;
        return s;
      case AnomalyKind::FrequencyChange:
        s.period *= p.period_multiplier;
        return s;
      case AnomalyKind::NoiseInjection:
        return s;
      case AnomalyKind::WaveletFamilyChange:
        for_selected([&](WaveletAtom& atom) { atom.family = p.new_family; });
        return s;
      case AnomalyKind::WaveletScaleChange:
        for_selected([&](WaveletAtom& atom) { atom.scale *= p.scale_factor; });
        return s;
      case AnomalyKind::WaveletShiftChange:
        for_selected([&](WaveletAtom& atom) { atom.shift += p.shift_delta; });
        return s;
      case AnomalyKind::WaveletAmplitudeChange:
        for_selected([&](WaveletAtom& atom) { atom.amplitude *= p.ratio; });
        return s;
      case AnomalyKind::AddWavelet:
        s.atoms.push_back(p.new_atom);
        return s;
      case AnomalyKind::RemoveWavelet:
        if (s.atoms.empty()) mismatch();
        s.atoms.erase(s.atoms.begin() +
                      static_cast<std::ptrdiff_t>(static_cast<std::size_t>(std::max(0, p.atom_index)) % s.atoms.size()));
        return s;
      default:
        mismatch();
    }
  }
};

}  // namespace

SeasonSpec mutate_season(const AnomalySpec& spec, const SeasonSpec& season) {
  if (!is_seasonal(spec.kind))
    throw Error(ErrorCode::KindMismatch, std::string("mutate_season needs a seasonal kind, got ") +
                                             std::string(to_string(spec.kind)));
  return std::visit(SeasonMutator{spec}, season);
}

Series render_season_window(const AnomalySpec& spec, const SeasonSpec& season, const ChannelContext& context) {
  const SeasonSpec mutated = mutate_season(spec, season);
  Series out = eval_season_window(mutated, spec.t_start, spec.t_end);
  if (spec.kind == AnomalyKind::NoiseInjection) {
    RngStream stream(spec.params.noise_seed);
    const double sd = spec.params.noise_std * context.scale;
    for (Index k = 0; k < out.size(); ++k) out[k] += sd * stream.normal();
  }
  return out;
}

void check_window(const AnomalySpec& spec, Index n, Index d) {
  if (spec.t_start < 0 || spec.t_start >= spec.t_end || spec.t_end > n)
    throw Error(ErrorCode::WindowOutOfRange, "window [" + std::to_string(spec.t_start) + ", " +
                                                 std::to_string(spec.t_end) + ") does not fit length " +
                                                 std::to_string(n));
  if (spec.channel < 0 || spec.channel >= d)
    throw Error(ErrorCode::WindowOutOfRange, "channel " + std::to_string(spec.channel) + " out of range");
}

Panel inject_exogenous(const Panel& x, const AnomalySpec& spec, std::span<const ChannelComponents> components) {
  check_window(spec, x.rows(), x.cols());
  Panel out = x;
  const Series channel = x.col(spec.channel);
  const ChannelContext ctx = local_context(channel, spec);
  const Index len = spec.length();
  if (is_local(spec.kind)) {
    const Series delta = render_delta(spec, ctx);
    for (Index k = 0; k < len; ++k) out(spec.t_start + k, spec.channel) = x(spec.t_start + k, spec.channel) + delta[k];
    return out;
  }
  if (static_cast<std::size_t>(spec.channel) >= components.size())
    throw Error(ErrorCode::ShapeMismatch, "missing components for seasonal injection");
  const auto& comp = components[static_cast<std::size_t>(spec.channel)];
  const Series replaced = render_season_window(spec, *comp.season, ctx);
  for (Index k = 0; k < len; ++k) {
    const Index t = spec.t_start + k;
    out(t, spec.channel) = (x(t, spec.channel) - comp.baseline->season[t]) + replaced[k];
  }
  return out;
}

void apply_endogenous_edit(std::vector<BaselineSeries>& baselines, const AnomalySpec& spec,
                           const SeasonSpec& source_season) {
  const auto n = baselines.empty() ? Index{0} : baselines.front().size();
  check_window(spec, n, static_cast<Index>(baselines.size()));
  BaselineSeries& base = baselines[static_cast<std::size_t>(spec.channel)];
  const ChannelContext ctx = local_context(base.composite, spec);
  const Index len = spec.length();
  if (is_local(spec.kind)) {
    const Series delta = render_delta(spec, ctx);
    for (Index k = 0; k < len; ++k) base.composite[spec.t_start + k] += delta[k];
    return;
  }
  const Series replaced = render_season_window(spec, source_season, ctx);
  for (Index k = 0; k < len; ++k) {
    const Index t = spec.t_start + k;
    base.season[t] = replaced[k];
    base.composite[t] = base.trend[t] + base.season[t] + base.noise[t];
  }
}

Panel stack_composites(std::span<const BaselineSeries> baselines) {
  const Index n = baselines.empty() ? 0 : baselines.front().size();
  Panel out(n, static_cast<Index>(baselines.size()));
  for (std::size_t i = 0; i < baselines.size(); ++i) {
    if (baselines[i].size() != n) throw Error(ErrorCode::LengthMismatch, "baselines differ in length");
    out.col(static_cast<Index>(i)) = baselines[i].composite;
  }
  return out;
}

CausalSystem inject_endogenous(std::vector<BaselineSeries> baselines, const AnomalySpec& spec,
                               const SeasonSpec& source_season, const Dag& dag, const ArxParams& arx,
                               const Eigen::VectorXd& alphas) {
  apply_endogenous_edit(baselines, spec, source_season);
  return simulate_system(stack_composites(baselines), dag, arx, alphas);
}

// ---------------------------------------------------------------- sampling

namespace {

void draw_local_params(AnomalySpec& spec, const AnomalyPriors& priors, RngStream& rng) {
  auto& p = spec.params;
  const std::int64_t ts = spec.t_start;
  const std::int64_t len = spec.length();
  p.amplitude = rng.uniform(priors.amplitude_min, priors.amplitude_max);
  switch (spec.kind) {
    case AnomalyKind::UpSpike:
    case AnomalyKind::DownSpike:
      p.half_width = (len + 1) / 2;
      p.center = ts + p.half_width - 1;
      break;
    case AnomalyKind::ContUpSpikes:
    case AnomalyKind::ContDownSpikes: {
      std::int64_t count = rng.uniform_int(3, 8);
      p.stride = std::max<std::int64_t>(1, len / count);
      count = std::min(count, std::max<std::int64_t>(1, len / p.stride));
      p.center = ts + p.stride / 2;
      for (std::int64_t m = 0; m < count; ++m) {
        p.spike_amplitudes.push_back(p.amplitude * rng.uniform(0.8, 1.2));
        p.spike_widths.push_back(rng.uniform_int(1, std::max<std::int64_t>(1, p.stride / 2)));
      }
      break;
    }
    case AnomalyKind::WideUpSpike:
    case AnomalyKind::WideDownSpike:
      p.rise = rng.uniform_int(1, std::max<std::int64_t>(1, len / 3));
      p.fall = rng.uniform_int(1, std::max<std::int64_t>(1, len / 3));
      break;
    case AnomalyKind::Outlier:
      p.center = ts;
      if (rng.bernoulli(0.5)) p.amplitude = -p.amplitude;
      break;
    case AnomalyKind::SuddenIncrease:
    case AnomalyKind::SuddenDecrease:
      p.center = ts + len / 2;
      p.kappa = 10.0 / static_cast<double>(std::max<std::int64_t>(1, len));
      break;
    case AnomalyKind::RapidRiseSlowDecline:
    case AnomalyKind::RapidDeclineSlowRise:
    case AnomalyKind::SlowRiseRapidDecline:
    case AnomalyKind::SlowDeclineRapidRise: {
      const auto fast = std::max<std::int64_t>(1, std::llround(static_cast<double>(len) * rng.uniform(0.02, 0.06)));
      const auto slow = std::max<std::int64_t>(4 * fast, std::llround(static_cast<double>(len) * rng.uniform(0.2, 0.4)));
      const bool rapid_first = spec.kind == AnomalyKind::RapidRiseSlowDecline ||
                               spec.kind == AnomalyKind::RapidDeclineSlowRise;
      p.rise = rapid_first ? fast : slow;
      p.fall = rapid_first ? slow : fast;
      p.peak = ts + (rapid_first ? len / 4 : (3 * len) / 4);
      break;
    }
    case AnomalyKind::DecreaseAfterUpSpike:
    case AnomalyKind::IncreaseAfterDownSpike:
    case AnomalyKind::IncreaseAfterUpSpike:
    case AnomalyKind::DecreaseAfterDownSpike:
      p.half_width = std::max<std::int64_t>(1, len / 8);
      p.center = ts + p.half_width - 1;
      p.shift_start = p.center + p.half_width;
      p.level_shift = p.amplitude * rng.uniform(0.4, 0.8);
      break;
    case AnomalyKind::Shake:
      p.frequency = rng.uniform(0.2, 0.5);
      p.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      break;
    default:
      break;
  }
}

double either(RngStream& rng, double lo1, double hi1, double lo2, double hi2) {
  return rng.bernoulli(0.5) ? rng.uniform(lo1, hi1) : rng.uniform(lo2, hi2);
}

void draw_seasonal_params(AnomalySpec& spec, const SeasonSpec& season, RngStream& rng) {
  auto& p = spec.params;
  const auto* sine = std::get_if<SineSeason>(&season);
  const auto* wavelet = std::get_if<WaveletSeason>(&season);
  const int n_sine = sine ? static_cast<int>(sine->atoms.size()) : 0;
  const int n_wave = wavelet ? static_cast<int>(wavelet->atoms.size()) : 0;
  constexpr double pi = std::numbers::pi;
  switch (spec.kind) {
    case AnomalyKind::AmplitudeScaling:
      p.ratio = either(rng, 0.2, 0.5, 2.0, 4.0);
      break;
    case AnomalyKind::FrequencyChange:
      p.period_multiplier = either(rng, 0.3, 0.7, 1.5, 3.0);
      break;
    case AnomalyKind::NoiseInjection:
      p.noise_std = rng.uniform(0.5, 2.0);
      p.noise_seed = rng();
      break;
    case AnomalyKind::WaveformChange:
      p.target_waveform = rng.bernoulli(0.5) ? SeasonCategory::Square : SeasonCategory::Triangle;
      break;
    case AnomalyKind::PhaseShift:
      p.phase_shift = rng.uniform(pi / 4.0, 7.0 * pi / 4.0);
      break;
    case AnomalyKind::AddHarmonic:
      p.harmonic_order = static_cast<int>(rng.uniform_int(2, 5));
      p.harmonic_amplitude = rng.uniform(0.3, 1.0);
      p.harmonic_phase = rng.uniform(0.0, 2.0 * pi);
      break;
    case AnomalyKind::RemoveHarmonic:
      p.harmonic_index = static_cast<int>(rng.uniform_int(0, std::max(0, n_sine - 1)));
      break;
    case AnomalyKind::ModifyHarmonicPhase:
      p.harmonic_index = static_cast<int>(rng.uniform_int(0, std::max(0, n_sine - 1)));
      p.new_value = sine->atoms[static_cast<std::size_t>(p.harmonic_index)].phase + rng.uniform(pi / 3.0, 5.0 * pi / 3.0);
      break;
    case AnomalyKind::ModifyAmpModDepth:
      p.harmonic_index = static_cast<int>(rng.uniform_int(0, std::max(0, n_sine - 1)));
      p.new_value = rng.uniform(0.0, 0.99);
      break;
    case AnomalyKind::ModifyModFrequency:
      p.new_value = sine->mod_frequency * either(rng, 0.2, 0.5, 2.0, 5.0);
      break;
    case AnomalyKind::ModifyModPhase:
      p.harmonic_index = static_cast<int>(rng.uniform_int(0, std::max(0, n_sine - 1)));
      p.new_value = sine->atoms[static_cast<std::size_t>(p.harmonic_index)].mod_phase + rng.uniform(pi / 3.0, 5.0 * pi / 3.0);
      break;
    case AnomalyKind::PulseShift:
      p.cycle_shift = (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(0.2, 0.5);
      break;
    case AnomalyKind::PulseWidthMod:
      p.duty_scale = either(rng, 0.3, 0.6, 1.5, 2.5);
      break;
    case AnomalyKind::WaveletFamilyChange: {
      const int current = static_cast<int>(wavelet->atoms.front().family);
      p.new_family = static_cast<WaveletFamily>((current + rng.uniform_int(1, 2)) % 3);
      p.atom_index = -1;
      break;
    }
    case AnomalyKind::WaveletScaleChange:
      p.scale_factor = either(rng, 0.3, 0.6, 1.8, 3.0);
      p.atom_index = -1;
      break;
    case AnomalyKind::WaveletShiftChange:
      p.shift_delta = (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(0.2, 0.5) * wavelet->period;
      p.atom_index = -1;
      break;
    case AnomalyKind::WaveletAmplitudeChange:
      p.ratio = either(rng, 0.2, 0.5, 2.0, 3.0);
      p.atom_index = -1;
      break;
    case AnomalyKind::AddWavelet: {
      const double ref = n_wave > 0 ? std::abs(wavelet->atoms.front().amplitude) : 1.0;
      p.new_atom.amplitude = (rng.bernoulli(0.5) ? 1.0 : -1.0) * ref * rng.uniform(0.5, 2.0);
      p.new_atom.family = static_cast<WaveletFamily>(rng.uniform_int(0, 2));
      p.new_atom.scale = std::max(0.5, rng.uniform(wavelet->period / 32.0, wavelet->period / 8.0));
      p.new_atom.shift = rng.uniform(0.0, wavelet->period);
      break;
    }
    case AnomalyKind::RemoveWavelet:
      p.atom_index = static_cast<int>(rng.uniform_int(0, std::max(0, n_wave - 1)));
      break;
    default:
      break;
  }
}

bool overlaps(std::int64_t b, std::int64_t e, std::span<const Occupied> occupied) {
  for (const auto& o : occupied)
    if (b < o.end && o.begin < e) return true;
  return false;
}

}  // namespace

std::optional<AnomalySpec> sample_anomaly_spec(std::int64_t n, std::span<const ChannelProfile> channels,
                                               const AnomalyPriors& priors, RngStream& stream,
                                               std::span<const Occupied> occupied) {
  if (n < 1 || channels.empty()) return std::nullopt;

  std::vector<AnomalyKind> allowed = priors.kinds;
  if (allowed.empty()) {
    const auto all = all_anomaly_kinds();
    allowed.assign(all.begin(), all.end());
  }

  std::vector<int> eligible;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    for (AnomalyKind k : allowed) {
      if (kind_compatible(k, *channels[c].season)) {
        eligible.push_back(static_cast<int>(c));
        break;
      }
    }
  }
  if (eligible.empty()) return std::nullopt;

  AnomalySpec spec;
  spec.channel = eligible[static_cast<std::size_t>(stream.uniform_int(0, static_cast<std::int64_t>(eligible.size()) - 1))];
  const ChannelProfile& profile = channels[static_cast<std::size_t>(spec.channel)];
  std::vector<AnomalyKind> compatible;
  for (AnomalyKind k : allowed)
    if (kind_compatible(k, *profile.season)) compatible.push_back(k);
  spec.kind = compatible[static_cast<std::size_t>(stream.uniform_int(0, static_cast<std::int64_t>(compatible.size()) - 1))];
  const bool endo = stream.bernoulli(priors.endogenous_prob);
  spec.mode = profile.has_descendants && endo ? InjectionMode::Endogenous : InjectionMode::Exogenous;

  const std::int64_t kind_min = std::min(min_window(spec.kind), n);
  const auto nd = static_cast<double>(n);
  std::int64_t lo = std::max<std::int64_t>(priors.window.min_abs, static_cast<std::int64_t>(priors.window.min_frac * nd));
  std::int64_t hi = std::max<std::int64_t>(priors.window.max_abs, static_cast<std::int64_t>(priors.window.max_frac * nd));
  hi = std::min(hi, n);
  lo = std::clamp(lo, kind_min, hi);
  std::int64_t len = spec.kind == AnomalyKind::Outlier ? 1 : stream.uniform_int(lo, std::max(lo, hi));
  const bool odd_only = spec.kind == AnomalyKind::UpSpike || spec.kind == AnomalyKind::DownSpike;
  if (odd_only && len % 2 == 0) len = std::max<std::int64_t>(1, len - 1);

  while (len >= kind_min && len >= 1) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      const std::int64_t start = stream.uniform_int(0, n - len);
      if (!overlaps(start, start + len, occupied)) {
        spec.t_start = start;
        spec.t_end = start + len;
        if (is_local(spec.kind))
          draw_local_params(spec, priors, stream);
        else
          draw_seasonal_params(spec, *profile.season, stream);
        return spec;
      }
    }
    if (len == 1) break;
    len /= 2;
    if (odd_only && len % 2 == 0) len = std::max<std::int64_t>(1, len - 1);
  }
  return std::nullopt;
}

}  // namespace tsadforge
