#include "igs/losses.hpp"

#include <algorithm>
#include <cmath>

namespace igs {
namespace {

void require_same_size(const std::vector<double>& a, const std::vector<double>& b,
                       const char* who) {
    if (a.size() != b.size()) throw DataError(std::string(who) + ": shape mismatch");
    if (a.empty()) throw DataError(std::string(who) + ": empty input");
}

}  // namespace

LossResult dice_loss(const std::vector<double>& y, const std::vector<double>& yhat) {
    require_same_size(y, yhat, "dice_loss");
    double s_inter = 0, s_y = 0, s_yh = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        if (yhat[i] < -1e-9 || yhat[i] > 1 + 1e-9)
            throw DataError("dice_loss: prediction outside [0,1]");
        s_inter += y[i] * yhat[i];
        s_y += y[i];
        s_yh += yhat[i];
    }
    double num = 2.0 * s_inter + 1.0;
    double den = s_y + s_yh + 1.0;
    LossResult r;
    r.value = 1.0 - num / den;
    r.grad.resize(y.size());
    for (size_t i = 0; i < y.size(); ++i)
        r.grad[i] = -(2.0 * y[i] * den - num) / (den * den);
    return r;
}

LossResult bce_loss(const std::vector<double>& y, const std::vector<double>& yhat) {
    require_same_size(y, yhat, "bce_loss");
    constexpr double lo = 1e-7, hi = 1.0 - 1e-7;
    LossResult r;
    r.grad.resize(y.size());
    for (size_t i = 0; i < y.size(); ++i) {
        if (yhat[i] < -1e-9 || yhat[i] > 1 + 1e-9)
            throw DataError("bce_loss: prediction outside [0,1]");
        double p = std::clamp(yhat[i], lo, hi);
        r.value -= y[i] * std::log(p);
        // clamp derivative: zero outside the active range
        r.grad[i] = (yhat[i] > lo && yhat[i] < hi) ? -y[i] / p : 0.0;
    }
    return r;
}

LossResult l1_loss(const std::vector<double>& y, const std::vector<double>& yhat) {
    require_same_size(y, yhat, "l1_loss");
    LossResult r;
    r.grad.resize(y.size());
    double n = double(y.size());
    for (size_t i = 0; i < y.size(); ++i) {
        double d = y[i] - yhat[i];
        r.value += std::fabs(d) / n;
        r.grad[i] = d > 0 ? -1.0 / n : (d < 0 ? 1.0 / n : 0.0);
    }
    return r;
}

LossResult ssim_loss(const std::vector<double>& y, const std::vector<double>& yhat,
                     const LossSpec& spec) {
    require_same_size(y, yhat, "ssim_loss");
    if (spec.dynamic_range <= 0) throw DataError("ssim_loss: dynamic_range must be positive");
    double n = double(y.size());
    double mx = 0, mh = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        mx += y[i];
        mh += yhat[i];
    }
    mx /= n;
    mh /= n;
    double vx = 0, vh = 0, cov = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        double dx = y[i] - mx, dh = yhat[i] - mh;
        vx += dx * dx;
        vh += dh * dh;
        cov += dx * dh;
    }
    vx /= n;
    vh /= n;
    cov /= n;

    double c1 = spec.ssim_c1(), c2 = spec.ssim_c2();
    double A = 2.0 * mx * mh + c1;
    double B = 2.0 * cov + c2;
    double C = mx * mx + mh * mh + c1;
    double D = vx + vh + c2;
    double S = (A * B) / (C * D);

    LossResult r;
    r.value = -S;
    r.grad.resize(y.size());
    for (size_t i = 0; i < y.size(); ++i) {
        double dA = 2.0 * mx / n;
        double dB = 2.0 * (y[i] - mx) / n;
        double dC = 2.0 * mh / n;
        double dD = 2.0 * (yhat[i] - mh) / n;
        double dS = (dA * B + A * dB) / (C * D) - S * (dC / C + dD / D);
        r.grad[i] = -dS;
    }
    return r;
}

LossResult eval_loss(const LossSpec& spec, const std::vector<double>& y,
                     const std::vector<double>& yhat) {
    switch (spec.kind) {
        case LossKind::Dice: return dice_loss(y, yhat);
        case LossKind::Bce: return bce_loss(y, yhat);
        case LossKind::L1: return l1_loss(y, yhat);
        case LossKind::Ssim: return ssim_loss(y, yhat, spec);
    }
    throw DataError("eval_loss: unknown loss kind");
}

double ssim_metric(const std::vector<double>& x, const std::vector<double>& xhat,
                   double dynamic_range) {
    LossSpec spec{LossKind::Ssim, dynamic_range};
    return -ssim_loss(x, xhat, spec).value;
}

double psnr(const std::vector<double>& x, const std::vector<double>& xhat,
            double dynamic_range) {
    require_same_size(x, xhat, "psnr");
    double mse = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - xhat[i];
        mse += d * d;
    }
    mse /= double(x.size());
    if (mse == 0) throw NumericError("psnr: identical inputs give infinite PSNR");
    return 10.0 * std::log10(dynamic_range * dynamic_range / mse);
}

double nmse(const std::vector<double>& x, const std::vector<double>& xhat) {
    require_same_size(x, xhat, "nmse");
    double num = 0, den = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - xhat[i];
        num += d * d;
        den += x[i] * x[i];
    }
    if (den == 0) throw DataError("nmse: all-zero reference");
    return num / den;
}

double dice_score(const std::vector<double>& y, const std::vector<double>& yhat) {
    require_same_size(y, yhat, "dice_score");
    double inter = 0, sy = 0, sh = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        double p = yhat[i] >= 0.5 ? 1.0 : 0.0;
        inter += p * y[i];
        sy += y[i];
        sh += p;
    }
    return (2.0 * inter + 1.0) / (sy + sh + 1.0);
}

}  // namespace igs
