#include "gsocc/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gsocc {

namespace {

constexpr double kMaxCondition = 1e12;

} // namespace

GaussianPrimitive GaussianPrimitive::create(const Vec3 &mean,
                                            const Vec3 &scale,
                                            const Quat &rotation,
                                            double opacity,
                                            std::vector<double> logits) {
    if (!mean.allFinite()) {
        throw Error(ErrorCode::kInvalidInput, "gaussian mean must be finite");
    }
    if (!scale.allFinite() || (scale.array() <= 0.0).any()) {
        throw Error(ErrorCode::kInvalidInput, "gaussian scales must be finite and positive");
    }
    const double qn = rotation.norm();
    if (!std::isfinite(qn) || qn == 0.0) {
        throw Error(ErrorCode::kInvalidInput, "gaussian rotation must be a nonzero quaternion");
    }
    if (!(opacity >= 0.0 && opacity <= 1.0)) {
        throw Error(ErrorCode::kInvalidInput, "gaussian opacity must lie in [0, 1]");
    }
    if (logits.empty() ||
        !std::all_of(logits.begin(), logits.end(), [](double c) { return std::isfinite(c); })) {
        throw Error(ErrorCode::kInvalidInput, "gaussian logits must be finite and non-empty");
    }
    GaussianPrimitive g;
    g.mean = mean;
    g.scale = scale.cwiseMax(kScaleFloor);
    g.rotation = rotation.normalized();
    g.opacity = opacity;
    g.logits = std::move(logits);
    return g;
}

GaussianSet::GaussianSet(std::size_t num_classes, Frame frame)
    : mNumClasses(num_classes), mFrame(frame) {
    if (num_classes == 0) {
        throw Error(ErrorCode::kInvalidInput, "gaussian set needs at least one class");
    }
}

GaussianSet::GaussianSet(std::size_t num_classes, Frame frame,
                         std::vector<GaussianPrimitive> gaussians)
    : GaussianSet(num_classes, frame) {
    mGaussians.reserve(gaussians.size());
    for (auto &g : gaussians) {
        push_back(std::move(g));
    }
}

void GaussianSet::push_back(GaussianPrimitive g) {
    if (g.num_classes() != mNumClasses) {
        throw Error(ErrorCode::kClassCountMismatch, "gaussian class count differs from set");
    }
    mGaussians.push_back(std::move(g));
}

Mat3 covariance(const GaussianPrimitive &g) {
    const Mat3 R = g.rotation.normalized().toRotationMatrix();
    Mat3 sigma = R * g.scale.array().square().matrix().asDiagonal() * R.transpose();
    // Symmetrize exactly; the product is symmetric only up to rounding.
    return 0.5 * (sigma + sigma.transpose());
}

Mat3 inverse_covariance(const GaussianPrimitive &g) {
    const Mat3 R = g.rotation.normalized().toRotationMatrix();
    Mat3 inv = R * g.scale.array().square().inverse().matrix().asDiagonal() * R.transpose();
    return 0.5 * (inv + inv.transpose());
}

double mahalanobis_sq(const GaussianPrimitive &g, const Vec3 &p) {
    const Vec3 local = g.rotation.normalized().toRotationMatrix().transpose() * (p - g.mean);
    return local.cwiseQuotient(g.scale).squaredNorm();
}

double evaluate(const GaussianPrimitive &g, const Vec3 &p) {
    if (!p.allFinite()) {
        throw Error(ErrorCode::kInvalidInput, "query point must be finite");
    }
    const double ratio = g.scale.maxCoeff() / g.scale.minCoeff();
    if (ratio * ratio > kMaxCondition) {
        throw Error(ErrorCode::kDegenerateGaussian, "gaussian covariance is near singular");
    }
    return std::exp(-0.5 * mahalanobis_sq(g, p));
}

GaussianSet prune(const GaussianSet &set, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw Error(ErrorCode::kInvalidInput, "pruning threshold must lie in [0, 1]");
    }
    GaussianSet out(set.num_classes(), set.frame());
    for (const auto &g : set) {
        if (g.opacity >= tau) {
            out.push_back(g);
        }
    }
    return out;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    if (logits.empty()) {
        return out;
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - peak);
        total += out[i];
    }
    for (auto &v : out) {
        v /= total;
    }
    return out;
}

double top1_confidence(const GaussianPrimitive &g) {
    const auto probs = softmax(g.logits);
    return *std::max_element(probs.begin(), probs.end());
}

} // namespace gsocc
