#pragma once

#include "gsocc/gaussian.hpp"
#include "gsocc/sampling.hpp"

#include <functional>

namespace gsocc {

/// Parameters of the heuristic attribute provider.
///
/// The provider stands in for a learned attribute head.  Its mapping:
///   scale   = sigma_factor * min(spacing, reference_spacing), isotropic
///   rotation= identity
///   opacity = a0 * exp(-decay * offset / reference_spacing)
///   logits  = logit_gain * one_hot(label)
/// With the default reference spacing (0.48 m / 15) this is exactly
/// a0 * exp(-decay * (k - 1)) and sigma_factor * spacing at K = 16.
struct AttributeConfig {
    std::size_t num_classes = 12;
    double sigma_factor = 0.75;
    double a0 = 0.9;
    double decay = 0.15;
    double logit_gain = 6.0;
    double reference_spacing = 0.032;

    void validate() const;
};

/// Throws Error(kInvalidLabel) unless 1 <= label <= num_classes - 1.
GaussianPrimitive heuristic_attributes(const SamplePoint &sample, int label,
                                       const AttributeConfig &cfg);

/// Pluggable provider: maps a sample and its surface label to a camera-frame
/// primitive.
using AttributeProvider = std::function<GaussianPrimitive(const SamplePoint &, int)>;

AttributeProvider make_heuristic_provider(AttributeConfig cfg);

} // namespace gsocc
