#include "tsadforge/rng.hpp"
#include "tsadforge/types.hpp"

#include <cmath>
#include <numbers>

namespace tsadforge {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NonStationaryAR: return "NonStationaryAR";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::NoGroundTruth: return "NoGroundTruth";
    case ErrorCode::InputTooShort: return "InputTooShort";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DigestMismatch: return "DigestMismatch";
  }
  return "Error";
}

std::string_view stage_tag(Stage stage) noexcept {
  switch (stage) {
    case Stage::Blueprint: return "blueprint";
    case Stage::Trend: return "trend";
    case Stage::Season: return "season";
    case Stage::Noise: return "noise";
    case Stage::Dag: return "dag";
    case Stage::Arx: return "arx";
    case Stage::Anomaly: return "anomaly";
    case Stage::Volatility: return "volatility";
  }
  return "";
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
  if (hi <= lo) return lo;
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>((*this)());  // full 64-bit range
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = max() - (max() % span + 1) % span;
  std::uint64_t r;
  do {
    r = (*this)();
  } while (r > limit);
  return lo + static_cast<std::int64_t>(r % span);
}

double RngStream::normal() noexcept {
  if (spare_normal_) {
    const double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::size_t RngStream::categorical(std::span<const double> weights) noexcept {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    acc += weights[i];
    if (u < acc) return i;
  }
  return last_positive;
}

std::uint64_t sample_sub_seed(std::uint64_t master_seed, std::uint64_t sample_index) noexcept {
  return mix64(master_seed ^ mix64(sample_index + 0x632be59bd9b4e019ULL));
}

RngStream derive_stream(std::uint64_t sub_seed, Stage stage) noexcept {
  return RngStream(mix64(sub_seed ^ fnv1a64(stage_tag(stage))));
}

}  // namespace tsadforge
