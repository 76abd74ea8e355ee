#pragma once

#include "igs/common.hpp"

namespace igs {

// Centered, unitary 2D Fourier pair. The zero frequency sits at
// (floor(H/2), floor(W/2)); total scaling is 1/sqrt(H*W) in each direction so
// that the transforms are unitary (Parseval holds and the adjoint of
// ifft2_unitary is fft2_unitary). Any H, W >= 2 is supported.
KSpace fft2_unitary(const Image& img);
KSpace fft2_unitary(const KSpace& x);
KSpace ifft2_unitary(const KSpace& k);

// Per-pixel sqrt(re^2 + im^2 + eps^2); smooth everywhere.
Image magnitude_smooth(const KSpace& k, double eps = 1e-12);

// Companion gradient rule: given upstream dL/d|z| returns the complex-packed
// pair gradient (dL/dre, dL/dim) = upstream * (re, im) / sqrt(re^2+im^2+eps^2).
KSpace magnitude_smooth_backward(const KSpace& z, const Image& upstream, double eps = 1e-12);

}  // namespace igs
