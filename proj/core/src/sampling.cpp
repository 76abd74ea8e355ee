#include "igs/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "igs/grid.hpp"
#include "igs/rng.hpp"

namespace igs {

int AccelerationSpec::budget(int n_lines) const {
    if (accel < 1.0) throw DataError("acceleration must be >= 1");
    int b = int(std::llround(double(n_lines) / accel));
    return std::max(1, std::min(n_lines, b));
}

SamplingPattern center_pattern(int n_lines, int budget) {
    if (budget < 1 || budget > n_lines) throw DataError("center_pattern: budget out of range");
    SamplingPattern p;
    p.width = n_lines;
    p.selected.assign(n_lines, 0);
    int start = (n_lines - budget) / 2;
    for (int i = start; i < start + budget; ++i) p.selected[i] = 1;
    return p;
}

SamplingPattern equispaced_pattern(int n_lines, int budget, int offset) {
    if (budget < 1 || budget > n_lines) throw DataError("equispaced_pattern: budget out of range");
    if (offset < 0) throw DataError("equispaced_pattern: offset must be nonnegative");
    SamplingPattern p;
    p.width = n_lines;
    p.selected.assign(n_lines, 0);
    for (int k = 0; k < budget; ++k) {
        long idx = std::llround(offset + double(k) * n_lines / budget) % n_lines;
        p.selected[idx] = 1;
    }
    // duplicates collapse; top up from the lowest unused index
    int have = p.cardinality();
    for (int i = 0; have < budget; ++i) {
        if (!p.selected[i]) {
            p.selected[i] = 1;
            ++have;
        }
    }
    return p;
}

SamplingPattern fastmri_style_pattern(int n_lines, int budget, double center_fraction,
                                      uint64_t seed) {
    if (budget < 1 || budget > n_lines)
        throw DataError("fastmri_style_pattern: budget out of range");
    if (center_fraction <= 0 || center_fraction >= 1)
        throw DataError("fastmri_style_pattern: center_fraction must be in (0,1)");
    int n_center = int(std::llround(center_fraction * n_lines));
    if (n_center > budget)
        throw DataError("fastmri_style_pattern: center block alone exceeds budget");
    SamplingPattern p;
    p.width = n_lines;
    p.selected.assign(n_lines, 0);
    int start = (n_lines - n_center) / 2;
    for (int i = start; i < start + n_center; ++i) p.selected[i] = 1;

    std::vector<int> rest;
    rest.reserve(n_lines - n_center);
    for (int i = 0; i < n_lines; ++i)
        if (!p.selected[i]) rest.push_back(i);
    Rng rng(seed);
    int need = budget - n_center;
    // partial Fisher-Yates: the first `need` slots are a uniform draw
    for (int i = 0; i < need; ++i) {
        int j = i + int(rng.below(uint64_t(rest.size() - i)));
        std::swap(rest[i], rest[j]);
        p.selected[rest[i]] = 1;
    }
    return p;
}

double fastmri_center_fraction(double accel, int n_lines) {
    if (accel < 1.0) throw DataError("fastmri_center_fraction: accel must be >= 1");
    double frac = 0.32 / accel;
    double min_frac = 1.0 / n_lines;  // keep at least one center line after rounding
    return std::max(frac, min_frac);
}

Image apply_pattern(const Image& img, const SamplingPattern& pat, double eps) {
    if (pat.width != img.w) throw DataError("apply_pattern: pattern width mismatch");
    std::vector<double> w(pat.selected.begin(), pat.selected.end());
    return apply_pattern_relaxed(img, w, eps);
}

Image apply_pattern_relaxed(const Image& img, const std::vector<double>& w, double eps) {
    if (int(w.size()) != img.w) throw DataError("apply_pattern_relaxed: pattern width mismatch");
    KSpace k = fft2_unitary(img);
    for (int r = 0; r < k.h; ++r)
        for (int c = 0; c < k.w; ++c) k.at(r, c) *= w[c];
    return magnitude_smooth(ifft2_unitary(k), eps);
}

}  // namespace igs
