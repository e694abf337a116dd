#pragma once

// Point-wise, event-aware, affiliation and volume-under-surface scores for
// univariate label series. Multivariate masks are usually reduced first
// (see flatten_any).

#include "tsadforge/types.hpp"

#include <cstdint>
#include <vector>

namespace tsadforge {

struct Segment {
  Index begin = 0;
  Index end = 0;  // exclusive

  bool operator==(const Segment&) const = default;
};

/// Maximal runs of ones.
std::vector<Segment> extract_events(const MaskSeries& mask);

/// Row-wise OR over channels.
MaskSeries flatten_any(const Mask& mask);

struct BinaryScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

/// 2PR/(P+R), 0 when P+R = 0.
double harmonic_f1(double precision, double recall) noexcept;

/// Point-wise confusion counts, no point adjustment. Throws LengthMismatch.
BinaryScore standard_f1(const MaskSeries& pred, const MaskSeries& labels);

/// Point precision, event recall (an event counts when any of its points is
/// predicted). fn counts missed events. Throws LengthMismatch.
BinaryScore f1_t(const MaskSeries& pred, const MaskSeries& labels);

/// Discrete affiliation precision/recall. Throws NoGroundTruth, LengthMismatch.
BinaryScore affiliation_f(const MaskSeries& pred, const MaskSeries& labels);

/// Continuous labels: each event extended by linear ramps of width `buffer`
/// (value 1 - delta/(buffer+1) at distance delta), max-merged.
Series buffered_labels(const MaskSeries& labels, Index buffer);

/// Area under the precision-recall curve for weighted labels in [0, 1],
/// thresholds at every unique score, anchored at (0, 1), step integration.
/// 0 when the labels sum to 0.
double pr_auc(const Series& scores, const Series& weights);

/// min(100, n / 10).
Index default_vus_buffer(Index n) noexcept;

/// Mean of pr_auc over buffers 0..buffer_max. Throws LengthMismatch.
double vus_pr(const Series& scores, const MaskSeries& labels, Index buffer_max);

struct ThresholdResult {
  double threshold = 0.0;
  BinaryScore score;
};

/// Candidate thresholds: every unique score when there are at most `grid` of
/// them, else nearest-rank quantiles at i/(grid-1). Prediction is
/// score >= threshold; ties keep the lowest threshold.
ThresholdResult best_f1_over_thresholds(const Series& scores, const MaskSeries& labels, int grid);

MaskSeries threshold_scores(const Series& scores, double threshold);

}  // namespace tsadforge
