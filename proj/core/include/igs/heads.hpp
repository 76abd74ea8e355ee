#pragma once

#include <array>
#include <cstdint>

#include "igs/common.hpp"
#include "igs/losses.hpp"

namespace igs {

enum class HeadKind { IdentityRecon, ConvSegmenter, ConvClassifier };

// Two-layer convolutional trunk: C filters of k x k ("same" zero padding)
// -> ReLU -> 1x1 combination. The segmenter applies a per-pixel sigmoid; the
// classifier mean-pools the combined map and emits the pair (p, 1-p) where
// index 0 is the lesion-present probability.
struct ConvHeadParams {
    int C = 8;
    int k = 5;
    std::vector<double> w1;  // C*k*k, filter-major
    std::vector<double> b1;  // C
    std::vector<double> w2;  // C
    double b2 = 0.0;

    size_t param_count() const { return w1.size() + b1.size() + w2.size() + 1; }
};

struct Head {
    HeadKind kind = HeadKind::IdentityRecon;
    ConvHeadParams p;
};

// Weights uniform in [-1/sqrt(k*k), +1/sqrt(k*k)] from the seeded generator;
// biases zero. IdentityRecon carries no parameters.
Head make_head(HeadKind kind, uint64_t seed, int C = 8, int k = 5);

// Prediction as a flat vector: h*w entries for identity/segmenter, 2 for the
// classifier.
std::vector<double> head_forward(const Head& head, const Image& img);

// Exact reverse-mode dL/d(input) given dL/d(prediction).
Image head_input_gradient(const Head& head, const Image& img,
                          const std::vector<double>& upstream);

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double lr = 1e-3;
    double eps = 1e-8;
    std::vector<double> m, v;
    long step = 0;

    void init(size_t n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
        step = 0;
    }
    void update(std::vector<double>& theta, const std::vector<double>& g);
};

// One training example: image plus both target forms. The loss kind picks the
// one it needs (Dice/BCE against masks or label pairs, L1/SSIM against a
// reference grid); for the classifier head the pair target is always used.
struct TrainSample {
    Image x;
    Image ygrid;                        // seg mask or recon reference
    std::array<double, 2> ypair{0, 0};  // one-hot (lesion, no-lesion)
};

// The target vector the given head/loss combination trains against.
std::vector<double> target_for(const Head& head, const LossSpec& loss, const TrainSample& s);

struct TrainResult {
    std::vector<double> curve;  // per-epoch mean loss
    int epochs_run = 0;
};

// Adam with the fixed hyperparameters; deterministic given seed. patience = 0
// disables early stopping; otherwise training stops after `patience` epochs
// without improvement of the epoch-mean training loss.
TrainResult train_head(Head& head, const std::vector<TrainSample>& data, const LossSpec& loss,
                       int epochs, int batch, uint64_t seed, int patience = 0);

}  // namespace igs
