#include "gsocc/losses.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace gsocc;
using namespace gsocc::testing;

namespace {

LossInput random_input(Rng &rng, int items, int classes, double gamma) {
    LossInput in;
    in.logits = Eigen::MatrixXd(items, classes);
    for (int i = 0; i < items; ++i) {
        for (int c = 0; c < classes; ++c) in.logits(i, c) = uniform(rng, -3, 3);
        in.targets.push_back(static_cast<int>(uniform(rng, 0, classes)));
    }
    in.focal_gamma = gamma;
    return in;
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

} // namespace

TEST(FocalLoss, GammaZeroIsCrossEntropy) {
    Rng rng(61);
    for (int t = 0; t < 50; ++t) {
        auto in = random_input(rng, 7, 5, 0.0);
        const double ce_direct = [&] {
            double s = 0.0;
            for (int i = 0; i < 7; ++i) {
                const double m = in.logits.row(i).maxCoeff();
                const double lse = m + std::log((in.logits.row(i).array() - m).exp().sum());
                s += lse - in.logits(i, in.targets[i]);
            }
            return s / 7.0;
        }();
        EXPECT_NEAR(focal_loss(in).value, cross_entropy(in), 1e-12);
        EXPECT_NEAR(cross_entropy(in), ce_direct, 1e-12);
    }
}

TEST(FocalLoss, HalfProbabilityTarget) {
    LossInput in;
    in.logits = Eigen::MatrixXd(1, 2);
    in.logits << 0.0, 0.0;
    in.targets = {1};
    in.focal_gamma = 2.0;
    EXPECT_NEAR(focal_loss(in).value, 0.25 * std::log(2.0), 1e-15);
    EXPECT_NEAR(focal_loss(in).value, 0.173287, 1e-6);
}

TEST(FocalLoss, ConfidentPredictionVanishes) {
    LossInput in;
    in.logits = Eigen::MatrixXd(1, 3);
    in.logits << 40.0, 0.0, 0.0;
    in.targets = {0};
    EXPECT_LT(focal_loss(in).value, 1e-30);
}

TEST(FocalLoss, GradientMatchesFiniteDifferences) {
    Rng rng(62);
    const double h = 1e-5;
    for (int t = 0; t < 30; ++t) {
        auto in = random_input(rng, 4, 4, uniform(rng, 0.0, 3.0));
        const auto res = focal_loss(in);
        for (int i = 0; i < 4; ++i) {
            for (int c = 0; c < 4; ++c) {
                LossInput up = in, down = in;
                up.logits(i, c) += h;
                down.logits(i, c) -= h;
                const double fd = (focal_loss(up).value - focal_loss(down).value) / (2 * h);
                if (std::abs(fd) < 1e-7 && std::abs(res.gradient(i, c)) < 1e-7) continue;
                EXPECT_LE(relative_error(res.gradient(i, c), fd), 1e-4);
            }
        }
    }
}

TEST(FocalLoss, IgnoredItemsAndErrors) {
    LossInput in;
    in.logits = Eigen::MatrixXd::Zero(2, 3);
    in.targets = {kIgnoreLabel, 1};
    const auto r = focal_loss(in);
    EXPECT_EQ(r.gradient.row(0).cwiseAbs().maxCoeff(), 0.0);
    in.targets = {kIgnoreLabel, kIgnoreLabel};
    try {
        focal_loss(in);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kUndefinedLoss);
    }
    in.targets = {0, 7};
    EXPECT_THROW(focal_loss(in), Error);
    in.targets = {0};
    EXPECT_THROW(focal_loss(in), Error);
}

TEST(Lovasz, PerfectHardPrediction) {
    LossInput in;
    in.logits = Eigen::MatrixXd(3, 2);
    in.logits << 1000, 0, 0, 1000, 1000, 0;
    in.targets = {0, 1, 0};
    EXPECT_NEAR(lovasz_softmax(in), 0.0, 1e-12);
}

TEST(Lovasz, SingleElement) {
    const std::vector<double> e{0.7};
    const std::vector<int> fg{1};
    EXPECT_NEAR(lovasz_class(e, fg), 0.7, 1e-15);
}

TEST(Lovasz, ClassMatchesPrefixAndPermutationOracles) {
    Rng rng(63);
    for (int t = 0; t < 200; ++t) {
        const int n = 1 + static_cast<int>(uniform(rng, 0, 7));
        std::vector<double> e(n);
        std::vector<int> fg(n);
        for (int i = 0; i < n; ++i) {
            e[i] = uniform(rng, 0, 1);
            fg[i] = uniform(rng, 0, 1) < 0.5;
        }
        fg[0] = 1;
        const double value = lovasz_class(e, fg);
        EXPECT_NEAR(value, lovasz_prefix_oracle(e, fg), 1e-9);
        if (n <= 6) EXPECT_NEAR(value, lovasz_permutation_oracle(e, fg), 1e-9);
    }
}

TEST(Lovasz, SoftmaxBinaryMatchesOracle) {
    Rng rng(64);
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + static_cast<int>(uniform(rng, 0, 8));
        auto in = random_input(rng, n, 2, 0.0);
        // Softmax probabilities and per-class errors computed here.
        double total = 0.0;
        int present = 0;
        for (int c = 0; c < 2; ++c) {
            std::vector<double> e(n);
            std::vector<int> fg(n);
            bool any = false;
            for (int i = 0; i < n; ++i) {
                const double p = 1.0 / (1.0 + std::exp(in.logits(i, 1 - c) - in.logits(i, c)));
                fg[i] = in.targets[i] == c;
                any |= fg[i] != 0;
                e[i] = std::abs(fg[i] - p);
            }
            if (!any) continue;
            total += lovasz_prefix_oracle(e, fg);
            ++present;
        }
        EXPECT_NEAR(lovasz_softmax(in), total / present, 1e-9);
    }
}

TEST(Huber, Branches) {
    const std::vector<double> gt{1.0, 1.0, 1.0};
    EXPECT_EQ(huber_depth(std::vector<double>{1.0}, std::vector<double>{1.0}).value, 0.0);
    EXPECT_DOUBLE_EQ(huber_depth(std::vector<double>{1.5}, std::vector<double>{1.0}).value, 0.125);
    EXPECT_DOUBLE_EQ(huber_depth(std::vector<double>{3.0}, std::vector<double>{1.0}).value, 1.5);
    EXPECT_DOUBLE_EQ(huber_depth(std::vector<double>{-1.0}, std::vector<double>{1.0}).value, 1.5);
}

TEST(Huber, SkipsInvalidGroundTruth) {
    const std::vector<double> pred{1.5, 7.0};
    const std::vector<double> gt{1.0, std::nan("")};
    const auto r = huber_depth(pred, gt);
    EXPECT_DOUBLE_EQ(r.value, 0.125);
    EXPECT_EQ(r.gradient[1], 0.0);
    const std::vector<double> none{std::nan("")};
    try {
        huber_depth(std::vector<double>{1.0}, none);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kUndefinedLoss);
    }
    EXPECT_THROW(huber_depth(pred, std::vector<double>{1.0}), Error);
    EXPECT_THROW(huber_depth(pred, gt, 0.0), Error);
}

TEST(Huber, GradientMatchesFiniteDifferences) {
    Rng rng(65);
    const double h = 1e-5;
    for (int t = 0; t < 50; ++t) {
        const int n = 6;
        std::vector<double> pred(n), gt(n);
        for (int i = 0; i < n; ++i) {
            gt[i] = uniform(rng, 0.5, 5);
            pred[i] = gt[i] + uniform(rng, -3, 3);
        }
        const double delta = uniform(rng, 0.2, 2.0);
        const auto r = huber_depth(pred, gt, delta);
        for (int i = 0; i < n; ++i) {
            auto up = pred, down = pred;
            up[i] += h;
            down[i] -= h;
            const double fd = (huber_depth(up, gt, delta).value - huber_depth(down, gt, delta).value) / (2 * h);
            EXPECT_LE(relative_error(r.gradient[i], fd), 1e-4);
        }
    }
}
