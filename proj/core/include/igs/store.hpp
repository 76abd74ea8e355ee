#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include "igs/common.hpp"
#include "igs/heads.hpp"
#include "igs/sampling.hpp"

namespace igs {

// Minimal binary tensor container. Layout, all little-endian:
//   magic "IGSD" | version u16 | dtype u8 | ndim u8 | dims u32[ndim] | payload
// dtype 1 = float32, 2 = uint8, 3 = complex64 (interleaved re,im float32).
// All writes are atomic (temp file + rename).

struct Tensor {
    uint8_t dtype = 0;
    std::vector<uint32_t> dims;
    std::vector<float> f32;                  // dtype 1
    std::vector<uint8_t> u8;                 // dtype 2
    std::vector<std::complex<float>> c64;    // dtype 3

    size_t count() const {
        size_t n = 1;
        for (uint32_t d : dims) n *= d;
        return dims.empty() ? 0 : n;
    }
};

void write_tensor(const std::string& path, const Tensor& t);
Tensor read_tensor(const std::string& path);

// Image/KSpace convenience wrappers (stored as float32 / complex64).
void write_image(const std::string& path, const Image& img);
Image read_image(const std::string& path);
void write_kspace(const std::string& path, const KSpace& k);
KSpace read_kspace(const std::string& path);

// Text pattern format:
//   n_lines=<N> budget=<Ns>
//   <index>          (ascending, one per line)
//   # transition: i1,i2,...   (optional, IGS selection order)
void write_pattern(const std::string& path, const SamplingPattern& pat);
SamplingPattern read_pattern(const std::string& path);

// Binary 8-bit P5. normalize: min-max to [0,255] (constant image -> 0);
// otherwise clip to [0,1] and scale with half-up rounding.
void write_pgm(const std::string& path, const Image& img, bool normalize);

// Head parameters as a flat float32 container (w1 | b1 | w2 | b2) plus a
// sidecar "<path>.meta" recording kind, C, k and shapes.
void write_head(const std::string& path, const Head& head);
Head read_head(const std::string& path);

}  // namespace igs
