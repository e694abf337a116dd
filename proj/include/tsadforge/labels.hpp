#pragma once

// Stage-4 masks: the intervention window on the source channel (root cause)
// and lag-shifted effect windows on its descendants (propagated).

#include "tsadforge/anomaly.hpp"
#include "tsadforge/causal.hpp"
#include "tsadforge/types.hpp"

#include <cstdint>
#include <map>

namespace tsadforge {

struct LabelMasks {
  Mask rootcause;
  Mask propagated;
  Mask any;  // rootcause OR propagated

  Index rows() const noexcept { return any.rows(); }
  Index cols() const noexcept { return any.cols(); }
};

struct LabelPolicy {
  double alpha_min = 0.0;          // descendants need alpha > alpha_min
  double epsilon = 0.01;           // decay-horizon threshold
  double horizon_cap_frac = 0.1;   // H_k <= floor(frac * n)
};

LabelMasks empty_masks(Index n, Index d);

/// OR-merges `other` into `into`. Throws ShapeMismatch.
void merge_masks(LabelMasks& into, const LabelMasks& other);

LabelMasks label_exogenous(const AnomalySpec& spec, Index n, Index d);

/// Minimal sum of edge lags over directed paths source -> k, for every
/// descendant k. Gains and mixing weights are ignored.
std::map<int, std::int64_t> min_path_lag(const Dag& dag, const ArxParams& arx, int source);

/// Same, restricted to paths along which an effect can actually travel: every
/// edge gain nonzero and every intermediate node with alpha > alpha_min.
std::map<int, std::int64_t> effective_path_lag(const Dag& dag, const ArxParams& arx, const Eigen::VectorXd& alphas,
                                                int source, double alpha_min);

/// ceil(ln eps / ln |a|), 0 when a == 0.
std::int64_t decay_horizon(double a, double epsilon);

LabelMasks label_endogenous(const AnomalySpec& spec, const Dag& dag, const ArxParams& arx,
                            const Eigen::VectorXd& alphas, Index n, Index d, const LabelPolicy& policy = {});

}  // namespace tsadforge
