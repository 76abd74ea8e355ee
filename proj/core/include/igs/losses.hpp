#pragma once

#include "igs/common.hpp"

namespace igs {

enum class LossKind { Dice, Bce, L1, Ssim };

struct LossSpec {
    LossKind kind = LossKind::L1;
    double dynamic_range = 1.0;

    double ssim_c1() const { return (0.01 * dynamic_range) * (0.01 * dynamic_range); }
    double ssim_c2() const { return (0.03 * dynamic_range) * (0.03 * dynamic_range); }
};

struct LossResult {
    double value = 0.0;
    std::vector<double> grad;  // d value / d yhat, same length as yhat
};

// Losses operate on flat vectors so the same code serves pixel grids and the
// classifier's probability pair.

// 1 - (2*sum(y*yhat) + 1) / (sum(y) + sum(yhat) + 1)
LossResult dice_loss(const std::vector<double>& y, const std::vector<double>& yhat);

// -sum(y_i * log(clamp(yhat_i))), clamp bounds [1e-7, 1 - 1e-7].
LossResult bce_loss(const std::vector<double>& y, const std::vector<double>& yhat);

// mean |y - yhat|; gradient uses sign(0) := 0.
LossResult l1_loss(const std::vector<double>& y, const std::vector<double>& yhat);

// Negative global-statistics SSIM with population (1/n) moments.
LossResult ssim_loss(const std::vector<double>& y, const std::vector<double>& yhat,
                     const LossSpec& spec);

LossResult eval_loss(const LossSpec& spec, const std::vector<double>& y,
                     const std::vector<double>& yhat);

// Reporting metrics.
double ssim_metric(const std::vector<double>& x, const std::vector<double>& xhat,
                   double dynamic_range = 1.0);
double psnr(const std::vector<double>& x, const std::vector<double>& xhat,
            double dynamic_range = 1.0);
double nmse(const std::vector<double>& x, const std::vector<double>& xhat);

// Hard Dice overlap of yhat >= 0.5 against the binary mask y (with the same
// +1 smoothing as the loss, so empty-vs-empty scores 1).
double dice_score(const std::vector<double>& y, const std::vector<double>& yhat);

}  // namespace igs
