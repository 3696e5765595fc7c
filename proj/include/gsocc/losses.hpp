#pragma once

#include "gsocc/common.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace gsocc {

inline constexpr int kIgnoreLabel = 255;

/// Per-item class logits (one row per item) and integer targets.  Items whose
/// target equals `ignore_label` do not contribute.
struct LossInput {
    Eigen::MatrixXd logits;
    std::vector<int> targets;
    int ignore_label = kIgnoreLabel;
    double focal_gamma = 2.0;
};

struct LossResult {
    double value = 0.0;
    Eigen::MatrixXd gradient; // same shape as the logits
};

/// mean_i -(1 - p_t)^gamma log p_t over non-ignored items, with its analytic
/// gradient.  Throws Error(kUndefinedLoss) when every item is ignored.
LossResult focal_loss(const LossInput &input);

/// Mean cross-entropy (focal loss at gamma = 0).
double cross_entropy(const LossInput &input);

/// Lovasz extension of the Jaccard loss on softmax errors, averaged over
/// classes present in the (non-ignored) targets.
double lovasz_softmax(const LossInput &input);

/// Lovasz extension for one class: `errors` are |fg - p|, `foreground` the
/// 0/1 ground truth.  Exposed for testing.
double lovasz_class(std::span<const double> errors, std::span<const int> foreground);

struct DepthLossResult {
    double value = 0.0;
    std::vector<double> gradient;
};

/// Mean Huber loss of pred - gt over items with finite gt.  Throws
/// kUndefinedLoss when no gt is valid, kInvalidInput on length mismatch or
/// non-positive delta.
DepthLossResult huber_depth(std::span<const double> pred, std::span<const double> gt,
                            double delta = 1.0);

} // namespace gsocc
