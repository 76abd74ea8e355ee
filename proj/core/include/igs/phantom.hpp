#pragma once

#include <cstdint>

#include "igs/common.hpp"

namespace igs {

struct Phantom {
    Image image;
    Image seg;       // binary lesion mask as 0/1 doubles
    int label = 0;   // 1 iff any lesion present
    int size = 0;
    int64_t seed = 0;
    int n_lesions = 0;
    double lesion_area_frac = 0.0;
};

// Deterministic synthetic slice: 2-4 nested smoothed ellipses on a dark
// background, plus (with probability lesion_prob) 1-3 small bright sharp
// lesions recorded in the mask. Additive Gaussian noise (sigma, default 0.01)
// is applied after mask extraction; intensities are clipped to [0,1].
Phantom gen_phantom(int size, int64_t seed, double lesion_prob, double noise_sigma = 0.01);

struct Dataset {
    std::vector<Phantom> train, val;
};

// Per-index seeds seed+i; first train_frac of the count goes to train, the
// next val_frac to val.
Dataset gen_dataset(int count, int size, int64_t seed, double lesion_prob, double train_frac,
                    double val_frac, double noise_sigma = 0.01);

// k-fold partition descriptor: fold -> validation indices; every index
// appears exactly once as validation.
std::vector<std::vector<int>> kfold_partition(int count, int folds);

}  // namespace igs
