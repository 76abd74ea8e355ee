#pragma once

#include "igs/heads.hpp"
#include "igs/sampling.hpp"

namespace igs {

struct IgsConfig {
    int budget = 1;
    LossSpec loss;
    double eps_mag = 1e-12;
    int batch_limit = 0;   // 0 = use every sample each iteration
    int jobs = 1;
    bool record_grads = false;
};

struct IgsTraceRow {
    int chosen = -1;
    double mean_loss_before = 0.0;
    std::vector<double> grad;  // only kept when record_grads is set
};

struct IgsTrace {
    std::vector<IgsTraceRow> rows;  // budget - 1 entries
    double final_mean_loss = 0.0;
};

// Gradient of the summed dataset loss with respect to the relaxed pattern:
// loss -> head input -> smooth magnitude -> adjoint of the inverse transform
// -> per-line reduction sum_r Re(conj(K[r,j]) * G[r,j]), summed over samples.
std::vector<double> mask_gradient(const std::vector<TrainSample>& data,
                                  const SamplingPattern& pat, const Head& head,
                                  const LossSpec& loss, double eps_mag = 1e-12, int jobs = 1);

// argmin over unselected lines, ties broken by lowest index.
int igs_select_line(const std::vector<double>& grad, const SamplingPattern& pat);

// Sanity diagnostic for the IdentityRecon + L1 chain on nonnegative images:
// adding a line's energy should not meaningfully increase the loss, so
// unselected-line gradients are expected nonpositive in aggregate. Individual
// pixels can overshoot the reference, which makes small positive entries
// (measured below 1% of the gradient scale) legitimate; a sign or adjoint bug
// flips entries wholesale. Returns the worst positive entry over unselected
// lines divided by the gradient scale (0 when none is positive). igs_run
// aborts when this exceeds the threshold below.
double identity_consistency_ratio(const std::vector<double>& grad, const SamplingPattern& pat);

inline constexpr double kIdentityConsistencyTol = 0.05;

// Algorithm: seed the center line, then budget-1 times accumulate the mask
// gradient and select the most negative unselected line.
std::pair<SamplingPattern, IgsTrace> igs_run(const std::vector<TrainSample>& data,
                                             const Head& head, const IgsConfig& cfg);

// Mean loss of the dataset under a (relaxed) pattern; shared by igs, oracle
// and the CLI.
double mean_loss(const std::vector<TrainSample>& data, const std::vector<double>& w,
                 const Head& head, const LossSpec& loss, double eps_mag = 1e-12, int jobs = 1);

}  // namespace igs
