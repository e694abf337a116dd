#pragma once

// Anomaly templates (local additive deltas and seasonal edits) and the two
// injection routes: exogenous (after simulation, one channel) and endogenous
// (on a baseline before causal mixing, re-simulated).

#include "tsadforge/causal.hpp"
#include "tsadforge/rng.hpp"
#include "tsadforge/signal.hpp"
#include "tsadforge/types.hpp"

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tsadforge {

enum class AnomalyKind {
  // local
  UpSpike,
  DownSpike,
  ContUpSpikes,
  ContDownSpikes,
  WideUpSpike,
  WideDownSpike,
  Outlier,
  SuddenIncrease,
  SuddenDecrease,
  PlateauConvex,
  PlateauConcave,
  RapidRiseSlowDecline,
  SlowRiseRapidDecline,
  RapidDeclineSlowRise,
  SlowDeclineRapidRise,
  DecreaseAfterUpSpike,
  IncreaseAfterDownSpike,
  IncreaseAfterUpSpike,
  DecreaseAfterDownSpike,
  Shake,
  // seasonal
  Inversion,
  AmplitudeScaling,
  FrequencyChange,
  NoiseInjection,
  WaveformChange,
  PhaseShift,
  AddHarmonic,
  RemoveHarmonic,
  ModifyHarmonicPhase,
  ModifyAmpModDepth,
  ModifyModFrequency,
  ModifyModPhase,
  PulseShift,
  PulseWidthMod,
  WaveletFamilyChange,
  WaveletScaleChange,
  WaveletShiftChange,
  WaveletAmplitudeChange,
  AddWavelet,
  RemoveWavelet,
};

inline constexpr int kNumLocalKinds = 20;
inline constexpr int kNumAnomalyKinds = 40;

constexpr bool is_local(AnomalyKind k) noexcept { return static_cast<int>(k) < kNumLocalKinds; }
constexpr bool is_seasonal(AnomalyKind k) noexcept { return !is_local(k); }

std::string_view to_string(AnomalyKind k) noexcept;
std::optional<AnomalyKind> parse_anomaly_kind(std::string_view name) noexcept;
std::array<AnomalyKind, kNumAnomalyKinds> all_anomaly_kinds() noexcept;

/// Whether a seasonal edit applies to the given season; local kinds always apply.
bool kind_compatible(AnomalyKind kind, const SeasonSpec& season) noexcept;

enum class InjectionMode { Exogenous, Endogenous };

std::string_view to_string(InjectionMode m) noexcept;

/// Numeric record for every template. Amplitudes (amplitude, level_shift,
/// spike_amplitudes, noise_std) are in units of the channel's local scale;
/// all times are absolute sample indices.
struct AnomalyParams {
  // spikes, shifts and transients
  double amplitude = 0.0;        // A
  double level_shift = 0.0;      // B
  std::int64_t center = 0;       // t0
  std::int64_t half_width = 1;   // w
  std::int64_t stride = 1;       // d (burst spacing)
  std::vector<double> spike_amplitudes;      // A_m
  std::vector<std::int64_t> spike_widths;    // w_m
  std::int64_t rise = 1;         // tau_r
  std::int64_t fall = 1;         // tau_f
  std::int64_t peak = 0;         // t_p
  std::int64_t shift_start = 0;  // t1
  double kappa = 1.0;
  double frequency = 0.25;       // f_h
  double phase = 0.0;

  // seasonal edits
  double ratio = 1.0;             // r (amplitude scaling, wavelet amplitude change)
  double period_multiplier = 1.0; // rho
  double noise_std = 0.0;         // sigma_S
  std::uint64_t noise_seed = 0;
  double phase_shift = 0.0;       // delta phi
  int harmonic_index = 0;         // n* (0-based)
  int harmonic_order = 2;         // m for add_harmonic
  double harmonic_amplitude = 0.0;
  double harmonic_phase = 0.0;
  double new_value = 0.0;         // phi', d', omega', psi' for the modify_* kinds
  double cycle_shift = 0.0;       // Delta for pulse_shift
  double duty_scale = 1.0;        // lambda for pulse_width_mod
  SeasonCategory target_waveform = SeasonCategory::Square;
  WaveletFamily new_family = WaveletFamily::Ricker;
  int atom_index = -1;            // -1: all atoms
  double scale_factor = 1.0;      // lambda for wavelet scale
  double shift_delta = 0.0;       // Delta tau
  WaveletAtom new_atom;
};

struct AnomalySpec {
  AnomalyKind kind = AnomalyKind::UpSpike;
  InjectionMode mode = InjectionMode::Exogenous;
  int channel = 0;
  std::int64_t t_start = 0;
  std::int64_t t_end = 1;
  AnomalyParams params;

  std::int64_t length() const noexcept { return t_end - t_start; }
};

/// Scale against which relative amplitudes are resolved.
struct ChannelContext {
  double scale = 1.0;
};

inline constexpr std::int64_t kMinContextPoints = 50;

/// Std of `channel` over [max(0, t_s - max(50, 5 w)), t_s), w being the spike
/// half-width for spike kinds and the window length otherwise; falls back to
/// the whole series when fewer than two points precede the window, and to 1
/// when flat.
ChannelContext local_context(const Series& channel, const AnomalySpec& spec);

/// Delta(t) for t in [t_s, t_e). Throws KindMismatch for seasonal kinds.
Series render_delta(const AnomalySpec& spec, const ChannelContext& context);

/// Season with the edit applied. noise_injection leaves the spec unchanged
/// (its noise is added by render_season_window). Throws KindMismatch.
SeasonSpec mutate_season(const AnomalySpec& spec, const SeasonSpec& season);

/// S'(t) for t in [t_s, t_e).
Series render_season_window(const AnomalySpec& spec, const SeasonSpec& season, const ChannelContext& context);

/// Per-channel baseline components plus the season spec that produced them.
struct ChannelComponents {
  const BaselineSeries* baseline = nullptr;
  const SeasonSpec* season = nullptr;
};

/// Checks 0 <= t_s < t_e <= n and channel < d. Throws WindowOutOfRange.
void check_window(const AnomalySpec& spec, Index n, Index d);

/// Local: x' = x + Delta on [t_s, t_e) of the target channel.
/// Seasonal: x' = x - S + S' on the window. Everything else bit-identical.
Panel inject_exogenous(const Panel& x, const AnomalySpec& spec, std::span<const ChannelComponents> components);

/// Edits the source channel's baseline in place (local: add Delta; seasonal:
/// swap S for S' within the window).
void apply_endogenous_edit(std::vector<BaselineSeries>& baselines, const AnomalySpec& spec,
                           const SeasonSpec& source_season);

/// Stacks composites into an n x d panel.
Panel stack_composites(std::span<const BaselineSeries> baselines);

/// apply_endogenous_edit followed by a full re-simulation.
CausalSystem inject_endogenous(std::vector<BaselineSeries> baselines, const AnomalySpec& spec,
                               const SeasonSpec& source_season, const Dag& dag, const ArxParams& arx,
                               const Eigen::VectorXd& alphas);

/// Window length bounds: L ~ U{max(min_abs, min_frac n), max(max_abs, max_frac n)}.
struct WindowPriors {
  std::int64_t min_abs = 5;
  double min_frac = 0.01;
  std::int64_t max_abs = 10;
  double max_frac = 0.1;
};

struct AnomalyPriors {
  std::vector<AnomalyKind> kinds;  // empty: every kind
  std::int64_t count_min = 1;
  std::int64_t count_max = 3;
  double amplitude_min = 2.0;
  double amplitude_max = 6.0;
  WindowPriors window;
  double endogenous_prob = 0.5;
};

/// What the sampler needs to know about one channel.
struct ChannelProfile {
  const SeasonSpec* season = nullptr;
  bool has_descendants = false;
};

/// Half-open occupied windows used for the non-overlap constraint.
struct Occupied {
  std::int64_t begin;
  std::int64_t end;
};

/// One anomaly: channel among those with a compatible kind, kind uniform over
/// compatible allowed kinds, endogenous with endogenous_prob when the channel
/// has descendants, window placed to avoid `occupied` (100 tries per length,
/// halving on failure). Returns nullopt when nothing fits.
std::optional<AnomalySpec> sample_anomaly_spec(std::int64_t n, std::span<const ChannelProfile> channels,
                                               const AnomalyPriors& priors, RngStream& stream,
                                               std::span<const Occupied> occupied = {});

}  // namespace tsadforge
