#include "tsadforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsadforge {

namespace {

void same_length(Index a, Index b) {
  if (a != b)
    throw Error(ErrorCode::LengthMismatch, "series lengths differ (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}

double ratio(double num, double den) noexcept { return den > 0.0 ? num / den : 0.0; }

double count_f1(std::int64_t tp, std::int64_t fp, std::int64_t fn) noexcept {
  return tp > 0 ? static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn) : 0.0;
}

}  // namespace

std::vector<Segment> extract_events(const MaskSeries& mask) {
  std::vector<Segment> out;
  Index t = 0;
  const Index n = mask.size();
  while (t < n) {
    if (!mask[t]) {
      ++t;
      continue;
    }
    const Index b = t;
    while (t < n && mask[t]) ++t;
    out.push_back({b, t});
  }
  return out;
}

MaskSeries flatten_any(const Mask& mask) {
  MaskSeries out = MaskSeries::Zero(mask.rows());
  for (Index t = 0; t < mask.rows(); ++t)
    for (Index c = 0; c < mask.cols(); ++c)
      if (mask(t, c)) {
        out[t] = 1;
        break;
      }
  return out;
}

double harmonic_f1(double p, double r) noexcept { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

BinaryScore standard_f1(const MaskSeries& pred, const MaskSeries& labels) {
  same_length(pred.size(), labels.size());
  BinaryScore s;
  for (Index t = 0; t < pred.size(); ++t) {
    const bool p = pred[t] != 0;
    const bool l = labels[t] != 0;
    s.tp += p && l;
    s.fp += p && !l;
    s.fn += !p && l;
  }
  s.precision = ratio(static_cast<double>(s.tp), static_cast<double>(s.tp + s.fp));
  s.recall = ratio(static_cast<double>(s.tp), static_cast<double>(s.tp + s.fn));
  s.f1 = count_f1(s.tp, s.fp, s.fn);
  return s;
}

BinaryScore f1_t(const MaskSeries& pred, const MaskSeries& labels) {
  same_length(pred.size(), labels.size());
  BinaryScore s;
  for (Index t = 0; t < pred.size(); ++t) {
    if (!pred[t]) continue;
    if (labels[t])
      ++s.tp;
    else
      ++s.fp;
  }
  const auto events = extract_events(labels);
  std::int64_t hit = 0;
  for (const auto& e : events) {
    bool found = false;
    for (Index t = e.begin; t < e.end && !found; ++t) found = pred[t] != 0;
    hit += found;
  }
  s.fn = static_cast<std::int64_t>(events.size()) - hit;
  s.precision = ratio(static_cast<double>(s.tp), static_cast<double>(s.tp + s.fp));
  s.recall = ratio(static_cast<double>(hit), static_cast<double>(events.size()));
  s.f1 = harmonic_f1(s.precision, s.recall);
  return s;
}

BinaryScore affiliation_f(const MaskSeries& pred, const MaskSeries& labels) {
  same_length(pred.size(), labels.size());
  const auto events = extract_events(labels);
  if (events.empty()) throw Error(ErrorCode::NoGroundTruth, "affiliation needs at least one labeled segment");
  const Index n = labels.size();
  const std::size_t k = events.size();

  std::vector<Index> bounds(k + 1);
  bounds[0] = 0;
  bounds[k] = n;
  for (std::size_t i = 1; i < k; ++i) bounds[i] = (events[i - 1].end + events[i].begin - 1) / 2 + 1;

  std::vector<Index> prev(static_cast<std::size_t>(n)), next(static_cast<std::size_t>(n));
  Index last = -1;
  for (Index t = 0; t < n; ++t) {
    if (pred[t]) last = t;
    prev[static_cast<std::size_t>(t)] = last;
  }
  last = -1;
  for (Index t = n - 1; t >= 0; --t) {
    if (pred[t]) last = t;
    next[static_cast<std::size_t>(t)] = last;
  }

  double precision_sum = 0.0;
  std::size_t precision_zones = 0;
  double recall_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const Index z0 = bounds[i];
    const Index z1 = bounds[i + 1];
    const auto zone = static_cast<double>(z1 - z0);
    const Index b = events[i].begin;
    const Index e = events[i].end;

    // Fraction of zone points at distance >= d from the segment.
    auto segment_survival = [&](Index d) {
      if (d <= 0) return 1.0;
      const Index left = std::max<Index>(0, b - d - z0 + 1);
      const Index right = std::max<Index>(0, z1 - (e - 1 + d));
      return static_cast<double>(left + right) / zone;
    };
    // Fraction of zone points at distance >= d from point y.
    auto point_survival = [&](Index y, Index d) {
      if (d <= 0) return 1.0;
      const Index left = std::max<Index>(0, y - d - z0 + 1);
      const Index right = std::max<Index>(0, z1 - (y + d));
      return static_cast<double>(left + right) / zone;
    };

    double p_acc = 0.0;
    Index p_count = 0;
    for (Index t = z0; t < z1; ++t) {
      if (!pred[t]) continue;
      const Index d = t < b ? b - t : (t >= e ? t - e + 1 : 0);
      p_acc += segment_survival(d);
      ++p_count;
    }
    if (p_count > 0) {
      precision_sum += p_acc / static_cast<double>(p_count);
      ++precision_zones;
      double r_acc = 0.0;
      for (Index y = b; y < e; ++y) {
        Index d = -1;
        const Index p = prev[static_cast<std::size_t>(y)];
        const Index q = next[static_cast<std::size_t>(y)];
        if (p >= z0) d = y - p;
        if (q >= 0 && q < z1 && (d < 0 || q - y < d)) d = q - y;
        r_acc += point_survival(y, d);
      }
      recall_sum += r_acc / static_cast<double>(e - b);
    }
  }

  BinaryScore s;
  s.precision = precision_zones ? precision_sum / static_cast<double>(precision_zones) : 0.0;
  s.recall = recall_sum / static_cast<double>(k);
  s.f1 = harmonic_f1(s.precision, s.recall);
  return s;
}

Series buffered_labels(const MaskSeries& labels, Index buffer) {
  const Index n = labels.size();
  Series out = Series::Zero(n);
  const double width = static_cast<double>(buffer + 1);
  for (const auto& seg : extract_events(labels)) {
    for (Index t = seg.begin; t < seg.end; ++t) out[t] = 1.0;
    for (Index delta = 1; delta <= buffer; ++delta) {
      const double v = 1.0 - static_cast<double>(delta) / width;
      if (seg.begin - delta >= 0) out[seg.begin - delta] = std::max(out[seg.begin - delta], v);
      if (seg.end - 1 + delta < n) out[seg.end - 1 + delta] = std::max(out[seg.end - 1 + delta], v);
    }
  }
  return out;
}

namespace {

// Scores sorted descending; `order` indexes into the original series.
double pr_auc_sorted(const Series& scores, const std::vector<Index>& order, const Series& weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) return 0.0;
  double tp = 0.0, fp = 0.0, area = 0.0, prev_recall = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      const double w = weights[order[i]];
      tp += w;
      fp += 1.0 - w;
      ++i;
    }
    const double recall = tp / total;
    const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 1.0;
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

std::vector<Index> descending_order(const Series& scores) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double pr_auc(const Series& scores, const Series& weights) {
  same_length(scores.size(), weights.size());
  return pr_auc_sorted(scores, descending_order(scores), weights);
}

Index default_vus_buffer(Index n) noexcept { return std::min<Index>(100, n / 10); }

double vus_pr(const Series& scores, const MaskSeries& labels, Index buffer_max) {
  same_length(scores.size(), labels.size());
  if (buffer_max < 0) throw Error(ErrorCode::InvalidSpec, "buffer must be nonnegative");
  const auto order = descending_order(scores);
  double sum = 0.0;
  for (Index l = 0; l <= buffer_max; ++l) sum += pr_auc_sorted(scores, order, buffered_labels(labels, l));
  return sum / static_cast<double>(buffer_max + 1);
}

MaskSeries threshold_scores(const Series& scores, double threshold) {
  MaskSeries out(scores.size());
  for (Index t = 0; t < scores.size(); ++t) out[t] = scores[t] >= threshold ? 1 : 0;
  return out;
}

ThresholdResult best_f1_over_thresholds(const Series& scores, const MaskSeries& labels, int grid) {
  same_length(scores.size(), labels.size());
  if (grid < 2) throw Error(ErrorCode::InvalidSpec, "grid must be at least 2");
  const Index n = scores.size();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "no scores");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] < scores[b]; });
  std::vector<double> sorted(static_cast<std::size_t>(n));
  std::vector<std::int64_t> suffix(static_cast<std::size_t>(n) + 1, 0);
  for (Index i = 0; i < n; ++i) sorted[static_cast<std::size_t>(i)] = scores[order[static_cast<std::size_t>(i)]];
  for (Index i = n - 1; i >= 0; --i)
    suffix[static_cast<std::size_t>(i)] = suffix[static_cast<std::size_t>(i) + 1] + (labels[order[static_cast<std::size_t>(i)]] ? 1 : 0);
  const std::int64_t positives = suffix[0];

  std::vector<double> unique = sorted;
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  std::vector<double> candidates;
  if (static_cast<int>(unique.size()) <= grid) {
    candidates = unique;
  } else {
    for (int i = 0; i < grid; ++i) {
      const double q = static_cast<double>(i) / static_cast<double>(grid - 1);
      const auto idx = static_cast<std::size_t>(std::llround(q * static_cast<double>(n - 1)));
      candidates.push_back(sorted[idx]);
    }
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  }

  ThresholdResult best;
  bool have = false;
  for (double th : candidates) {
    const auto k = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), th) - sorted.begin());
    BinaryScore s;
    s.tp = suffix[k];
    s.fp = (n - static_cast<std::int64_t>(k)) - s.tp;
    s.fn = positives - s.tp;
    s.precision = ratio(static_cast<double>(s.tp), static_cast<double>(s.tp + s.fp));
    s.recall = ratio(static_cast<double>(s.tp), static_cast<double>(positives));
    s.f1 = count_f1(s.tp, s.fp, s.fn);
    // 2tp / (2tp + fp + fn), compared exactly so equal scores keep the lower threshold.
    if (!have || 2 * s.tp * (2 * best.score.tp + best.score.fp + best.score.fn) >
                     2 * best.score.tp * (2 * s.tp + s.fp + s.fn)) {
      best = {th, s};
      have = true;
    }
  }
  return best;
}

}  // namespace tsadforge
