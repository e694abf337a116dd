#include "tsadforge/detect.hpp"

#include <algorithm>
#include <cmath>

namespace tsadforge {

namespace {

void check_window_size(Index w) {
  if (w < 2) throw Error(ErrorCode::InvalidSpec, "detector window must be at least 2");
}

struct Moments {
  double mean;
  double stddev;
};

// Population moments of x[b, e), accumulated relative to `ref`.
Moments moments(const Series& x, Index b, Index e, double ref) {
  const auto count = static_cast<double>(e - b);
  double sum = 0.0;
  for (Index t = b; t < e; ++t) sum += x[t] - ref;
  const double mean = sum / count;
  double sq = 0.0;
  for (Index t = b; t < e; ++t) {
    const double dev = (x[t] - ref) - mean;
    sq += dev * dev;
  }
  return {mean, std::sqrt(sq / count)};
}

}  // namespace

Series zscore_detector(const Series& x, Index window) {
  check_window_size(window);
  const Index n = x.size();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "zscore needs a nonempty series");
  Series out = Series::Zero(n);
  for (Index t = 2; t < n; ++t) {
    const Index b = std::max<Index>(0, t - window);
    const Moments m = moments(x, b, t, x[t]);
    out[t] = std::abs(m.mean) / (m.stddev + kStdFloor);
  }
  return out;
}

Series context_discrepancy_detector(const Series& x, Index window) {
  check_window_size(window);
  const Index n = x.size();
  if (n < 2 * window)
    throw Error(ErrorCode::InputTooShort, "series of length " + std::to_string(n) + " is shorter than 2W = " +
                                              std::to_string(2 * window));
  Series out = Series::Zero(n);
  for (Index t = window; t + window <= n; ++t) {
    const double ref = x[t];
    const Moments a = moments(x, t - window, t, ref);
    const Moments b = moments(x, t, t + window, ref);
    const double pooled = std::sqrt(0.5 * (a.stddev * a.stddev + b.stddev * b.stddev));
    out[t] = std::abs(b.mean - a.mean) / (pooled + kStdFloor);
  }
  return out;
}

Series detect(const Panel& x, DetectorKind kind, Index window) {
  if (x.rows() == 0 || x.cols() == 0) throw Error(ErrorCode::EmptyInput, "no values to score");
  Series out;
  for (Index c = 0; c < x.cols(); ++c) {
    const Series col = x.col(c);
    Series s = kind == DetectorKind::ZScore ? zscore_detector(col, window) : context_discrepancy_detector(col, window);
    out = c == 0 ? s : out.cwiseMax(s).eval();
  }
  return out;
}

}  // namespace tsadforge
