#include "igs/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "igs/grid.hpp"
#include "igs/rng.hpp"

namespace igs {
namespace {

struct EllipseFrame {
    double cx, cy, a, b, ca, sa;
};

// Test against pixel centers (r + 0.5, c + 0.5).
inline bool inside(const EllipseFrame& e, double x, double y) {
    double dx = x - e.cx, dy = y - e.cy;
    double u = (e.ca * dx + e.sa * dy) / e.a;
    double v = (-e.sa * dx + e.ca * dy) / e.b;
    return u * u + v * v <= 1.0;
}

void paint(Image& img, const EllipseFrame& e, double value) {
    for (int r = 0; r < img.h; ++r)
        for (int c = 0; c < img.w; ++c)
            if (inside(e, c + 0.5, r + 0.5)) img.at(r, c) = value;
}

// Gaussian low-pass in the centered spectrum; the sharp lesions are painted
// afterwards so only the anatomy loses its high frequencies.
void smooth(Image& img, double sigma) {
    KSpace k = fft2_unitary(img);
    int h = img.h, w = img.w;
    double cst = -2.0 * M_PI * M_PI * sigma * sigma;
    for (int r = 0; r < h; ++r) {
        double fr = double(r - h / 2) / h;
        for (int c = 0; c < w; ++c) {
            double fc = double(c - w / 2) / w;
            k.at(r, c) *= std::exp(cst * (fr * fr + fc * fc));
        }
    }
    KSpace z = ifft2_unitary(k);
    for (size_t i = 0; i < img.v.size(); ++i) img.v[i] = z.v[i].real();
}

EllipseFrame frame(double cx, double cy, double a, double b, double ang) {
    return {cx, cy, a, b, std::cos(ang), std::sin(ang)};
}

}  // namespace

Phantom gen_phantom(int size, int64_t seed, double lesion_prob, double noise_sigma) {
    if (size < 8) throw DataError("gen_phantom: size must be >= 8");
    if (lesion_prob < 0 || lesion_prob > 1)
        throw DataError("gen_phantom: lesion_prob must lie in [0,1]");
    Rng rng{uint64_t(seed)};
    Phantom ph;
    ph.size = size;
    ph.seed = seed;
    ph.image = Image(size, size);
    std::fill(ph.image.v.begin(), ph.image.v.end(), 0.05);
    ph.seg = Image(size, size);

    // Nested anatomy: each ring shrinks and brightens.
    int n_body = int(rng.integers(2, 5));
    double cx = size / 2.0 + rng.uniform(-0.04, 0.04) * size;
    double cy = size / 2.0 + rng.uniform(-0.04, 0.04) * size;
    double a = rng.uniform(0.32, 0.42) * size;
    double b = rng.uniform(0.32, 0.42) * size;
    double ang = rng.uniform(0.0, M_PI);
    double intensity = rng.uniform(0.20, 0.40);
    EllipseFrame body = frame(cx, cy, a, b, ang);
    paint(ph.image, body, intensity);
    for (int i = 1; i < n_body; ++i) {
        double f = rng.uniform(0.55, 0.8);
        a *= f;
        b *= f;
        double cx2 = cx + rng.uniform(-0.03, 0.03) * size;
        double cy2 = cy + rng.uniform(-0.03, 0.03) * size;
        double ang2 = rng.uniform(0.0, M_PI);
        intensity = std::min(0.70, intensity + rng.uniform(0.10, 0.20));
        paint(ph.image, frame(cx2, cy2, a, b, ang2), intensity);
    }
    smooth(ph.image, 0.025 * size);

    if (rng.uniform01() < lesion_prob) {
        ph.label = 1;
        int n_les = int(rng.integers(1, 4));
        for (int il = 0; il < n_les; ++il) {
            double la = std::max(1.0, rng.uniform(0.030, 0.055) * size);
            double lb = std::max(1.0, rng.uniform(0.030, 0.055) * size);
            double lang = rng.uniform(0.0, M_PI);
            double lcx = std::floor(body.cx) + 0.5, lcy = std::floor(body.cy) + 0.5;
            double rmax = std::max(la, lb);
            for (int attempt = 0; attempt < 64; ++attempt) {
                double t = rng.uniform(0.0, 2.0 * M_PI);
                double r = std::sqrt(rng.uniform01());
                double px = 0.6 * body.a * r * std::cos(t);
                double py = 0.6 * body.b * r * std::sin(t);
                double tx = body.cx + body.ca * px - body.sa * py;
                double ty = body.cy + body.sa * px + body.ca * py;
                tx = std::floor(tx) + 0.5;
                ty = std::floor(ty) + 0.5;
                // keep the whole lesion inside the outer ellipse with a
                // one-pixel margin
                double da = body.a - rmax - 1.0, db = body.b - rmax - 1.0;
                if (da <= 0 || db <= 0) continue;
                double dx = tx - body.cx, dy = ty - body.cy;
                double u = (body.ca * dx + body.sa * dy) / da;
                double v = (-body.sa * dx + body.ca * dy) / db;
                if (u * u + v * v <= 1.0) {
                    lcx = tx;
                    lcy = ty;
                    break;
                }
            }
            EllipseFrame les = frame(lcx, lcy, la, lb, lang);
            double cur = 0, grown = 0;
            for (double m : ph.seg.v) cur += m;
            Image trial = ph.seg;
            for (int r = 0; r < size; ++r)
                for (int c = 0; c < size; ++c)
                    if (inside(les, c + 0.5, r + 0.5)) trial.at(r, c) = 1.0;
            for (double m : trial.v) grown += m;
            if (cur > 0 && grown > 0.045 * size * size) break;
            double glow = rng.uniform(0.92, 1.0);
            for (int r = 0; r < size; ++r)
                for (int c = 0; c < size; ++c)
                    if (inside(les, c + 0.5, r + 0.5)) ph.image.at(r, c) = glow;
            ph.seg = std::move(trial);
            ++ph.n_lesions;
        }
    }
    double area = 0;
    for (double m : ph.seg.v) area += m;
    ph.lesion_area_frac = area / double(size * size);

    if (noise_sigma > 0)
        for (auto& px : ph.image.v) px += noise_sigma * rng.normal();
    for (auto& px : ph.image.v) px = std::clamp(px, 0.0, 1.0);
    return ph;
}

Dataset gen_dataset(int count, int size, int64_t seed, double lesion_prob, double train_frac,
                    double val_frac, double noise_sigma) {
    if (count < 1) throw DataError("gen_dataset: count must be >= 1");
    if (train_frac < 0 || val_frac < 0 || train_frac + val_frac > 1.0 + 1e-12)
        throw DataError("gen_dataset: fractions must be nonnegative and sum to <= 1");
    int n_train = int(std::llround(train_frac * count));
    int n_val = int(std::llround(val_frac * count));
    n_train = std::min(n_train, count);
    n_val = std::min(n_val, count - n_train);
    Dataset ds;
    ds.train.reserve(n_train);
    ds.val.reserve(n_val);
    for (int i = 0; i < n_train; ++i)
        ds.train.push_back(gen_phantom(size, seed + i, lesion_prob, noise_sigma));
    for (int i = 0; i < n_val; ++i)
        ds.val.push_back(gen_phantom(size, seed + n_train + i, lesion_prob, noise_sigma));
    return ds;
}

std::vector<std::vector<int>> kfold_partition(int count, int folds) {
    if (folds < 2 || folds > count) throw DataError("kfold_partition: need 2 <= folds <= count");
    std::vector<std::vector<int>> out(folds);
    // contiguous blocks, the first count % folds blocks take one extra
    int base = count / folds, rem = count % folds, idx = 0;
    for (int f = 0; f < folds; ++f) {
        int len = base + (f < rem ? 1 : 0);
        for (int i = 0; i < len; ++i) out[f].push_back(idx++);
    }
    return out;
}

}  // namespace igs
