#pragma once

#include "gsocc/common.hpp"

#include <span>
#include <vector>

namespace gsocc {

/// Smallest admissible per-axis scale (meters).
inline constexpr double kScaleFloor = 1e-4;

/// Default opacity pruning threshold.
inline constexpr double kDefaultPruneTau = 0.01;

/// Anisotropic semantic Gaussian: mean, per-axis scale, rotation, opacity and
/// class logits.  Use `GaussianPrimitive::create` to get a validated value;
/// the aggregate constructor is left open for bulk loaders that validate
/// separately.
struct GaussianPrimitive {
    Vec3 mean = Vec3::Zero();
    Vec3 scale = Vec3::Constant(kScaleFloor);
    Quat rotation = Quat::Identity();
    double opacity = 0.0;
    std::vector<double> logits;

    /// Normalizes the quaternion, floors the scales at kScaleFloor and checks
    /// opacity/logit ranges.  Throws Error(kInvalidInput) on violation.
    static GaussianPrimitive create(const Vec3 &mean,
                                    const Vec3 &scale,
                                    const Quat &rotation,
                                    double opacity,
                                    std::vector<double> logits);

    std::size_t num_classes() const { return logits.size(); }
};

/// A homogeneous collection of primitives sharing class count and frame.
class GaussianSet {
public:
    GaussianSet(std::size_t num_classes, Frame frame);
    GaussianSet(std::size_t num_classes, Frame frame, std::vector<GaussianPrimitive> gaussians);

    void push_back(GaussianPrimitive g);

    std::size_t size() const { return mGaussians.size(); }
    bool empty() const { return mGaussians.empty(); }
    std::size_t num_classes() const { return mNumClasses; }
    Frame frame() const { return mFrame; }

    const GaussianPrimitive &operator[](std::size_t i) const { return mGaussians[i]; }
    std::span<const GaussianPrimitive> gaussians() const { return mGaussians; }

    auto begin() const { return mGaussians.begin(); }
    auto end() const { return mGaussians.end(); }

private:
    std::size_t mNumClasses;
    Frame mFrame;
    std::vector<GaussianPrimitive> mGaussians;
};

/// Sigma = R diag(s^2) R^T.
Mat3 covariance(const GaussianPrimitive &g);

/// Sigma^-1 from the factored form R diag(s^-2) R^T.
Mat3 inverse_covariance(const GaussianPrimitive &g);

/// Squared Mahalanobis distance of p from the Gaussian's mean.
double mahalanobis_sq(const GaussianPrimitive &g, const Vec3 &p);

/// Kernel value exp(-0.5 (p-mu)^T Sigma^-1 (p-mu)).  Throws
/// kDegenerateGaussian when the covariance condition number exceeds 1e12.
double evaluate(const GaussianPrimitive &g, const Vec3 &p);

/// Keeps members with opacity >= tau, preserving order.
GaussianSet prune(const GaussianSet &set, double tau = kDefaultPruneTau);

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

/// Largest softmax probability of the logits.
double top1_confidence(const GaussianPrimitive &g);

} // namespace gsocc
