#pragma once

// Two non-learned scorers. Higher is more anomalous.

#include "tsadforge/types.hpp"

namespace tsadforge {

inline constexpr Index kDefaultDetectorWindow = 100;
inline constexpr double kStdFloor = 1e-8;

/// |x[t] - mean| / (std + 1e-8) over the trailing window [max(0, t-W), t);
/// scores stay 0 until the window holds two points. Throws EmptyInput, InvalidSpec (W < 2).
Series zscore_detector(const Series& x, Index window = kDefaultDetectorWindow);

/// |mean(B) - mean(A)| / (pooled std + 1e-8) for A = [t-W, t), B = [t, t+W);
/// positions without two full windows score 0. Throws InputTooShort (n < 2W),
/// InvalidSpec (W < 2).
Series context_discrepancy_detector(const Series& x, Index window = kDefaultDetectorWindow);

enum class DetectorKind { ZScore, ContextDiscrepancy };

/// Applies the detector per channel and keeps the maximum across channels.
Series detect(const Panel& x, DetectorKind kind, Index window = kDefaultDetectorWindow);

}  // namespace tsadforge
