#pragma once

#include <cstdint>

#include "igs/common.hpp"

namespace igs {

// Binary pattern over k-space columns (the sampled lines) plus the order in
// which lines were chosen when an optimizer produced it.
struct SamplingPattern {
    int width = 0;
    std::vector<uint8_t> selected;     // length width, values 0/1
    std::vector<int> transition_log;   // selection order; empty for baselines

    int cardinality() const {
        int n = 0;
        for (uint8_t s : selected) n += s;
        return n;
    }
};

struct AccelerationSpec {
    double accel = 1.0;
    int budget(int n_lines) const;  // round(n / accel), clamped to [1, n]
};

// Contiguous block of `budget` lines starting at floor((n - budget)/2).
SamplingPattern center_pattern(int n_lines, int budget);

// round(offset + k*n/budget) mod n, deduplicated, topped up from the lowest
// unused index so cardinality is exact.
SamplingPattern equispaced_pattern(int n_lines, int budget, int offset);

// Fully-sampled central block of round(center_fraction*n) lines; the rest of
// the budget drawn uniformly without replacement from the remaining lines.
SamplingPattern fastmri_style_pattern(int n_lines, int budget, double center_fraction,
                                      uint64_t seed);

// Convention used by the benchmark harness: 0.32/accel, clamped from below so
// the central block keeps at least one line.
double fastmri_center_fraction(double accel, int n_lines);

// Zero-filled reconstruction: magnitude of the inverse transform of the
// column-masked spectrum.
Image apply_pattern(const Image& img, const SamplingPattern& pat, double eps = 1e-12);

// Same, with the pattern relaxed to real weights (used by gradient checks).
Image apply_pattern_relaxed(const Image& img, const std::vector<double>& w, double eps = 1e-12);

}  // namespace igs
