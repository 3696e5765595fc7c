#include "gsocc/attributes.hpp"

#include <cmath>
#include <string>

namespace gsocc {

void AttributeConfig::validate() const {
    if (num_classes < 2) {
        throw Error(ErrorCode::kInvalidInput, "attribute provider needs at least two classes");
    }
    if (!(sigma_factor > 0.0 && std::isfinite(sigma_factor))) {
        throw Error(ErrorCode::kInvalidInput, "sigma_factor must be positive");
    }
    if (!(a0 >= 0.0 && a0 <= 1.0)) {
        throw Error(ErrorCode::kInvalidInput, "a0 must lie in [0, 1]");
    }
    if (!(decay >= 0.0 && std::isfinite(decay))) {
        throw Error(ErrorCode::kInvalidInput, "decay must be non-negative");
    }
    if (!std::isfinite(logit_gain)) {
        throw Error(ErrorCode::kInvalidInput, "logit_gain must be finite");
    }
    if (!(reference_spacing > 0.0 && std::isfinite(reference_spacing))) {
        throw Error(ErrorCode::kInvalidInput, "reference_spacing must be positive");
    }
}

GaussianPrimitive heuristic_attributes(const SamplePoint &sample, int label,
                                       const AttributeConfig &cfg) {
    if (label < 1 || static_cast<std::size_t>(label) >= cfg.num_classes) {
        throw Error(ErrorCode::kInvalidLabel,
                    "label " + std::to_string(label) + " outside 1.." +
                        std::to_string(cfg.num_classes - 1));
    }
    const double spacing = std::min(sample.spacing, cfg.reference_spacing);
    const double sigma = cfg.sigma_factor * spacing;
    const double opacity = cfg.a0 * std::exp(-cfg.decay * sample.offset / cfg.reference_spacing);

    std::vector<double> logits(cfg.num_classes, 0.0);
    logits[static_cast<std::size_t>(label)] = cfg.logit_gain;
    return GaussianPrimitive::create(sample.position, Vec3::Constant(sigma), Quat::Identity(),
                                     opacity, std::move(logits));
}

AttributeProvider make_heuristic_provider(AttributeConfig cfg) {
    cfg.validate();
    return [cfg](const SamplePoint &sample, int label) {
        return heuristic_attributes(sample, label, cfg);
    };
}

} // namespace gsocc
