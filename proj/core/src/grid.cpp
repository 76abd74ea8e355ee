#include "igs/grid.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace igs {
namespace {

// FFTW plan creation is not thread-safe and planning is costly relative to
// our small transforms, so plans are cached per (h, w, sign). Plans are
// created with FFTW_UNALIGNED and executed via the new-array interface on
// caller buffers, which keeps execution thread-safe and results independent
// of buffer alignment.
class PlanCache {
  public:
    fftw_plan get(int h, int w, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::tuple<int, int, int>(h, w, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<fftw_complex> tmp(size_t(h) * w);
        fftw_plan p = fftw_plan_dft_2d(h, w, tmp.data(), tmp.data(), sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

  private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

// fftshift: DC bin (0,0) moves to (floor(h/2), floor(w/2)).
KSpace shift_fwd(const KSpace& x) {
    KSpace out(x.h, x.w);
    int dh = x.h / 2, dw = x.w / 2;
    for (int r = 0; r < x.h; ++r) {
        int rr = (r + dh) % x.h;
        for (int c = 0; c < x.w; ++c) out.at(rr, (c + dw) % x.w) = x.at(r, c);
    }
    return out;
}

// ifftshift: exact inverse of shift_fwd for any parity.
KSpace shift_inv(const KSpace& x) {
    KSpace out(x.h, x.w);
    int dh = x.h / 2, dw = x.w / 2;
    for (int r = 0; r < x.h; ++r) {
        int rr = (r + dh) % x.h;
        for (int c = 0; c < x.w; ++c) out.at(r, c) = x.at(rr, (c + dw) % x.w);
    }
    return out;
}

KSpace run_fft(const KSpace& in, int sign) {
    KSpace out(in.h, in.w);
    fftw_plan p = cache().get(in.h, in.w, sign);
    // fftw_complex and std::complex<double> share layout.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.v.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.v.data());
    fftw_execute_dft(p, src, dst);
    return out;
}

}  // namespace

KSpace fft2_unitary(const KSpace& x) {
    require_shape(x.h, x.w, "fft2_unitary");
    require_finite(x, "fft2_unitary");
    KSpace out = shift_fwd(run_fft(x, FFTW_FORWARD));
    double s = 1.0 / std::sqrt(double(x.h) * double(x.w));
    for (auto& z : out.v) z *= s;
    return out;
}

KSpace fft2_unitary(const Image& img) {
    require_shape(img.h, img.w, "fft2_unitary");
    require_finite(img, "fft2_unitary");
    KSpace x(img.h, img.w);
    for (size_t i = 0; i < img.v.size(); ++i) x.v[i] = img.v[i];
    return fft2_unitary(x);
}

KSpace ifft2_unitary(const KSpace& k) {
    require_shape(k.h, k.w, "ifft2_unitary");
    require_finite(k, "ifft2_unitary");
    KSpace out = run_fft(shift_inv(k), FFTW_BACKWARD);
    double s = 1.0 / std::sqrt(double(k.h) * double(k.w));
    for (auto& z : out.v) z *= s;
    return out;
}

Image magnitude_smooth(const KSpace& k, double eps) {
    if (eps <= 0) throw DataError("magnitude_smooth: eps must be positive");
    Image out(k.h, k.w);
    for (size_t i = 0; i < k.v.size(); ++i) {
        double re = k.v[i].real(), im = k.v[i].imag();
        out.v[i] = std::sqrt(re * re + im * im + eps * eps);
    }
    return out;
}

KSpace magnitude_smooth_backward(const KSpace& z, const Image& upstream, double eps) {
    if (z.h != upstream.h || z.w != upstream.w)
        throw DataError("magnitude_smooth_backward: shape mismatch");
    KSpace out(z.h, z.w);
    for (size_t i = 0; i < z.v.size(); ++i) {
        double re = z.v[i].real(), im = z.v[i].imag();
        double m = std::sqrt(re * re + im * im + eps * eps);
        out.v[i] = std::complex<double>(upstream.v[i] * re / m, upstream.v[i] * im / m);
    }
    return out;
}

}  // namespace igs
