#include "gsocc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gsocc {

namespace {

void check_input(const LossInput &input) {
    if (static_cast<std::size_t>(input.logits.rows()) != input.targets.size()) {
        throw Error(ErrorCode::kInvalidInput, "logit rows and targets differ in length");
    }
    if (input.logits.cols() < 1) {
        throw Error(ErrorCode::kInvalidInput, "logits need at least one class column");
    }
    if (!input.logits.allFinite()) {
        throw Error(ErrorCode::kInvalidInput, "logits must be finite");
    }
    if (!(input.focal_gamma >= 0.0)) {
        throw Error(ErrorCode::kInvalidInput, "focal gamma must be non-negative");
    }
    const int nc = static_cast<int>(input.logits.cols());
    for (int t : input.targets) {
        if (t != input.ignore_label && (t < 0 || t >= nc)) {
            throw Error(ErrorCode::kInvalidLabel, "target outside the class range");
        }
    }
}

// Row-wise log-softmax.
Eigen::VectorXd log_softmax(const Eigen::Ref<const Eigen::VectorXd> &z) {
    const double peak = z.maxCoeff();
    const double lse = peak + std::log((z.array() - peak).exp().sum());
    return z.array() - lse;
}

std::size_t count_valid(const LossInput &input) {
    return static_cast<std::size_t>(std::count_if(input.targets.begin(), input.targets.end(),
                                                  [&](int t) { return t != input.ignore_label; }));
}

} // namespace

LossResult focal_loss(const LossInput &input) {
    check_input(input);
    const std::size_t valid = count_valid(input);
    if (valid == 0) {
        throw Error(ErrorCode::kUndefinedLoss, "every item is ignored");
    }
    const double gamma = input.focal_gamma;
    const double inv_n = 1.0 / static_cast<double>(valid);

    LossResult result;
    result.gradient = Eigen::MatrixXd::Zero(input.logits.rows(), input.logits.cols());
    double total = 0.0;
    for (Eigen::Index i = 0; i < input.logits.rows(); ++i) {
        const int t = input.targets[static_cast<std::size_t>(i)];
        if (t == input.ignore_label) {
            continue;
        }
        const Eigen::VectorXd logp = log_softmax(input.logits.row(i).transpose());
        const Eigen::VectorXd p = logp.array().exp();
        const double log_pt = logp[t];
        const double pt = p[t];
        const double q = 1.0 - pt;
        const double modulator = gamma == 0.0 ? 1.0 : std::pow(q, gamma);
        total += -modulator * log_pt;

        // dL/dp_t * p_t, then chain through dp_t/dz_k = p_t (delta_tk - p_k).
        double dl_dpt_times_pt = -modulator;
        if (gamma != 0.0 && q > 0.0) {
            dl_dpt_times_pt += gamma * std::pow(q, gamma - 1.0) * log_pt * pt;
        }
        Eigen::VectorXd g = -p;
        g[t] += 1.0;
        result.gradient.row(i) = (dl_dpt_times_pt * inv_n) * g.transpose();
    }
    result.value = total * inv_n;
    return result;
}

double cross_entropy(const LossInput &input) {
    check_input(input);
    const std::size_t valid = count_valid(input);
    if (valid == 0) {
        throw Error(ErrorCode::kUndefinedLoss, "every item is ignored");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < input.logits.rows(); ++i) {
        const int t = input.targets[static_cast<std::size_t>(i)];
        if (t != input.ignore_label) {
            total += -log_softmax(input.logits.row(i).transpose())[t];
        }
    }
    return total / static_cast<double>(valid);
}

double lovasz_class(std::span<const double> errors, std::span<const int> foreground) {
    const std::size_t n = errors.size();
    if (foreground.size() != n) {
        throw Error(ErrorCode::kInvalidInput, "errors and foreground differ in length");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return errors[a] > errors[b]; });

    const double gts = static_cast<double>(std::count(foreground.begin(), foreground.end(), 1));
    double cum_fg = 0.0;
    double cum_bg = 0.0;
    double previous = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = order[i];
        if (foreground[idx]) {
            cum_fg += 1.0;
        } else {
            cum_bg += 1.0;
        }
        const double intersection = gts - cum_fg;
        const double uni = gts + cum_bg;
        const double jaccard = 1.0 - intersection / uni;
        loss += errors[idx] * (jaccard - previous);
        previous = jaccard;
    }
    return loss;
}

double lovasz_softmax(const LossInput &input) {
    check_input(input);
    const std::size_t valid = count_valid(input);
    if (valid == 0) {
        throw Error(ErrorCode::kUndefinedLoss, "every item is ignored");
    }
    const auto nc = static_cast<int>(input.logits.cols());
    std::vector<Eigen::VectorXd> probs;
    std::vector<int> targets;
    probs.reserve(valid);
    targets.reserve(valid);
    for (Eigen::Index i = 0; i < input.logits.rows(); ++i) {
        const int t = input.targets[static_cast<std::size_t>(i)];
        if (t == input.ignore_label) {
            continue;
        }
        probs.push_back(log_softmax(input.logits.row(i).transpose()).array().exp());
        targets.push_back(t);
    }

    std::vector<double> errors(valid);
    std::vector<int> fg(valid);
    double total = 0.0;
    int present = 0;
    for (int c = 0; c < nc; ++c) {
        bool any = false;
        for (std::size_t i = 0; i < valid; ++i) {
            fg[i] = targets[i] == c ? 1 : 0;
            any = any || fg[i];
            errors[i] = std::abs(static_cast<double>(fg[i]) - probs[i][c]);
        }
        if (!any) {
            continue;
        }
        total += lovasz_class(errors, fg);
        ++present;
    }
    return total / static_cast<double>(present);
}

DepthLossResult huber_depth(std::span<const double> pred, std::span<const double> gt,
                            double delta) {
    if (pred.size() != gt.size()) {
        throw Error(ErrorCode::kInvalidInput, "prediction and ground truth differ in length");
    }
    if (!(delta > 0.0 && std::isfinite(delta))) {
        throw Error(ErrorCode::kInvalidInput, "huber delta must be positive");
    }
    const auto valid = static_cast<std::size_t>(
        std::count_if(gt.begin(), gt.end(), [](double g) { return std::isfinite(g); }));
    if (valid == 0) {
        throw Error(ErrorCode::kUndefinedLoss, "no valid ground-truth depth");
    }
    const double inv_n = 1.0 / static_cast<double>(valid);
    DepthLossResult result;
    result.gradient.assign(pred.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!std::isfinite(gt[i])) {
            continue;
        }
        const double r = pred[i] - gt[i];
        const double a = std::abs(r);
        if (a <= delta) {
            total += 0.5 * r * r;
            result.gradient[i] = r * inv_n;
        } else {
            total += delta * (a - 0.5 * delta);
            result.gradient[i] = (r > 0.0 ? delta : -delta) * inv_n;
        }
    }
    result.value = total * inv_n;
    return result;
}

} // namespace gsocc
