#pragma once

#include "igs/igs.hpp"

namespace igs {

// Brute-force references used by tests and validation runs only.

// Central differences of the dataset loss on the relaxed pattern.
std::vector<double> fd_mask_gradient(const std::vector<TrainSample>& data,
                                     const SamplingPattern& pat, const Head& head,
                                     const LossSpec& loss, double step = 1e-4,
                                     double eps_mag = 1e-12);

struct GreedyStep {
    int best = -1;
    std::vector<std::pair<int, double>> table;  // (line, loss with that line added)
};

// True one-step lookahead: evaluate the loss with each unselected line turned
// on, return the argmin (ties to lowest index) and the full table.
GreedyStep exhaustive_greedy_step(const std::vector<TrainSample>& data,
                                  const SamplingPattern& pat, const Head& head,
                                  const LossSpec& loss, double eps_mag = 1e-12);

}  // namespace igs
