#include <cmath>

#include "doctest.h"
#include "igs/losses.hpp"
#include "igs/rng.hpp"
#include "test_util.hpp"

using namespace igs;

namespace {

using Vec = std::vector<double>;

Vec rand_vec(size_t n, uint64_t seed, double lo, double hi) {
    Rng rng{seed};
    Vec v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

Vec rand_binary(size_t n, uint64_t seed) {
    Rng rng{seed};
    Vec v(n);
    for (auto& x : v) x = rng.uniform01() < 0.5 ? 0.0 : 1.0;
    return v;
}

// Central finite differences of the loss value w.r.t. yhat.
template <typename F>
Vec fd_grad(F loss_value, const Vec& yhat, double h = 1e-5) {
    Vec g(yhat.size());
    for (size_t i = 0; i < yhat.size(); ++i) {
        Vec p = yhat, m = yhat;
        p[i] += h;
        m[i] -= h;
        g[i] = (loss_value(p) - loss_value(m)) / (2.0 * h);
    }
    return g;
}

double max_rel_err(const Vec& got, const Vec& want) {
    double worst = 0;
    for (size_t i = 0; i < got.size(); ++i) {
        double denom = std::max(std::fabs(want[i]), 1e-10);
        worst = std::max(worst, std::fabs(got[i] - want[i]) / denom);
    }
    return worst;
}

}  // namespace

TEST_SUITE("losses") {

TEST_CASE("dice pinned values") {
    Vec ones(4, 1.0), zeros(4, 0.0);
    CHECK(dice_loss(ones, ones).value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dice_loss(ones, zeros).value == doctest::Approx(0.8).epsilon(1e-12));  // 1 - 1/5
}

TEST_CASE("dice value range and argument validation") {
    for (uint64_t s = 0; s < 10; ++s) {
        auto y = rand_binary(16, 100 + s);
        auto yh = rand_vec(16, 200 + s, 0.0, 1.0);
        double v = dice_loss(y, yh).value;
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
    Vec y(4, 1.0);
    CHECK_THROWS_AS(dice_loss(y, Vec{0.5, 0.5, 0.5}), DataError);
    CHECK_THROWS_AS(dice_loss(y, Vec{0.5, 0.5, 0.5, 1.5}), DataError);
    CHECK_THROWS_AS(dice_loss(y, Vec{0.5, 0.5, 0.5, -0.2}), DataError);
    CHECK_THROWS_AS(dice_loss(Vec{}, Vec{}), DataError);
}

TEST_CASE("dice gradient vs finite differences") {
    auto y = rand_binary(64, 7);
    auto yh = rand_vec(64, 8, 0.05, 0.95);
    auto r = dice_loss(y, yh);
    auto fd = fd_grad([&](const Vec& p) { return dice_loss(y, p).value; }, yh);
    CHECK(max_rel_err(r.grad, fd) < 1e-5);
}

TEST_CASE("bce pinned values") {
    Vec y{1.0, 0.0};
    auto r = bce_loss(y, Vec{0.5, 0.5});
    CHECK(r.value == doctest::Approx(0.6931471805599453).epsilon(1e-9));
    CHECK(r.grad[0] == doctest::Approx(-2.0).epsilon(1e-12));  // -1/0.5
    CHECK(r.grad[1] == 0.0);                                   // y = 0 entry

    auto confident = bce_loss(y, Vec{1.0 - 1e-7, 0.3});
    CHECK(confident.value > 0.0);
    CHECK(confident.value < 2e-7);
}

TEST_CASE("bce clamp zeroes the gradient outside the active range") {
    Vec y{1.0, 0.0};
    auto r = bce_loss(y, Vec{1e-9, 0.5});
    CHECK(r.value == doctest::Approx(-std::log(1e-7)).epsilon(1e-9));
    CHECK(r.grad[0] == 0.0);

    CHECK_THROWS_AS(bce_loss(y, Vec{1.5, 0.5}), DataError);
    CHECK_THROWS_AS(bce_loss(y, Vec{-0.5, 0.5}), DataError);
    CHECK_THROWS_AS(bce_loss(y, Vec{0.5}), DataError);
}

TEST_CASE("bce gradient vs finite differences") {
    Vec y{1.0, 1.0};
    Vec yh{0.3, 0.8};
    auto r = bce_loss(y, yh);
    auto fd = fd_grad([&](const Vec& p) { return bce_loss(y, p).value; }, yh, 1e-6);
    CHECK(max_rel_err(r.grad, fd) < 1e-6);
}

TEST_CASE("l1 pinned values and tie handling") {
    Vec x{1, 2, 3, 4}, zeros(4, 0.0);
    CHECK(l1_loss(x, x).value == 0.0);
    CHECK(l1_loss(x, zeros).value == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(l1_loss(x, zeros).value == l1_loss(zeros, x).value);
    // sign(0) := 0
    for (double g : l1_loss(x, x).grad) CHECK(g == 0.0);
    CHECK_THROWS_AS(l1_loss(x, Vec{1, 2}), DataError);
}

TEST_CASE("l1 gradient vs finite differences away from ties") {
    auto x = rand_vec(32, 9, 0.0, 1.0);
    auto xh = rand_vec(32, 10, 2.0, 3.0);  // disjoint ranges: no ties, no crossings
    auto r = l1_loss(x, xh);
    auto fd = fd_grad([&](const Vec& p) { return l1_loss(x, p).value; }, xh);
    CHECK(max_rel_err(r.grad, fd) < 1e-6);
}

TEST_CASE("ssim of an image with itself is -1") {
    auto x = rand_vec(64, 11, 0.0, 1.0);
    LossSpec spec{LossKind::Ssim, 1.0};
    CHECK(ssim_loss(x, x, spec).value == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ssim_metric(x, x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim matches an independently computed formula") {
    auto x = rand_vec(64, 12, 0.0, 1.0);
    Vec xh = x;
    for (auto& v : xh) v += 0.5;
    LossSpec spec{LossKind::Ssim, 1.0};
    double got = ssim_loss(x, xh, spec).value;

    // Independent evaluation via sum-of-products moment identities.
    double n = 64.0, sx = 0, sh = 0, sxx = 0, shh = 0, sxh = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sh += xh[i];
        sxx += x[i] * x[i];
        shh += xh[i] * xh[i];
        sxh += x[i] * xh[i];
    }
    double mx = sx / n, mh = sh / n;
    double vx = sxx / n - mx * mx, vh = shh / n - mh * mh, cov = sxh / n - mx * mh;
    double c1 = 1e-4, c2 = 9e-4;
    double want = -((2 * mx * mh + c1) * (2 * cov + c2)) /
                  ((mx * mx + mh * mh + c1) * (vx + vh + c2));
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
    CHECK(got > -1.0);
}

TEST_CASE("ssim symmetry and validation") {
    auto x = rand_vec(36, 13, 0.0, 1.0);
    auto xh = rand_vec(36, 14, 0.0, 1.0);
    LossSpec spec{LossKind::Ssim, 1.0};
    CHECK(ssim_loss(x, xh, spec).value == ssim_loss(xh, x, spec).value);
    CHECK(ssim_loss(x, xh, spec).value >= -1.0);
    CHECK(ssim_loss(x, xh, spec).value <= 1.0);
    CHECK_THROWS_AS(ssim_loss(x, xh, LossSpec{LossKind::Ssim, 0.0}), DataError);
    CHECK_THROWS_AS(ssim_loss(x, Vec{1.0}, spec), DataError);
}

TEST_CASE("ssim gradient vs finite differences") {
    auto x = rand_vec(64, 15, 0.0, 1.0);
    auto xh = rand_vec(64, 16, 0.0, 1.0);
    LossSpec spec{LossKind::Ssim, 1.0};
    auto r = ssim_loss(x, xh, spec);
    auto fd = fd_grad([&](const Vec& p) { return ssim_loss(x, p, spec).value; }, xh);
    CHECK(max_rel_err(r.grad, fd) < 1e-4);
}

TEST_CASE("eval_loss dispatches by kind") {
    auto y = rand_binary(16, 17);
    auto yh = rand_vec(16, 18, 0.1, 0.9);
    CHECK(eval_loss(LossSpec{LossKind::Dice, 1.0}, y, yh).value == dice_loss(y, yh).value);
    CHECK(eval_loss(LossSpec{LossKind::L1, 1.0}, y, yh).value == l1_loss(y, yh).value);
    LossSpec sp{LossKind::Ssim, 1.0};
    CHECK(eval_loss(sp, y, yh).value == ssim_loss(y, yh, sp).value);
}

TEST_CASE("psnr pinned values") {
    Vec x(16, 0.25), off(16, 1.25);     // MSE = 1 = range^2
    CHECK(psnr(x, off, 1.0) == doctest::Approx(0.0).epsilon(1e-12));

    Vec near(16, 0.26);                 // MSE = 1e-4
    CHECK(psnr(x, near, 1.0) == doctest::Approx(40.0).epsilon(1e-9));

    Vec half(16);
    for (auto& v : half) v = 0.25 + 0.01 / std::sqrt(2.0);  // MSE halved
    CHECK(psnr(x, half, 1.0) - psnr(x, near, 1.0) ==
          doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-6));

    CHECK_THROWS_AS(psnr(x, x, 1.0), NumericError);
}

TEST_CASE("nmse pinned values") {
    auto x = rand_vec(32, 19, 0.1, 1.0);
    Vec zeros(32, 0.0), twice = x;
    for (auto& v : twice) v *= 2.0;
    CHECK(nmse(x, x) == 0.0);
    CHECK(nmse(x, zeros) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nmse(x, twice) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(nmse(zeros, x), DataError);
}

TEST_CASE("dice score thresholds at 0.5") {
    Vec y{1, 0, 1, 0};
    Vec yh{0.7, 0.4, 0.2, 0.1};  // thresholded prediction: 1,0,0,0
    CHECK(dice_score(y, yh) == doctest::Approx(0.75).epsilon(1e-12));  // (2+1)/(2+1+1)
    Vec empty(4, 0.0), low(4, 0.2);
    CHECK(dice_score(empty, low) == doctest::Approx(1.0).epsilon(1e-12));
}

}  // TEST_SUITE
