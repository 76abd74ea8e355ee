#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace igs {

// Error classes map onto CLI exit codes: DataError -> 3, NumericError -> 4.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require_shape(int h, int w, const char* who) {
    if (h < 2 || w < 2) throw DataError(std::string(who) + ": grid dimensions must be >= 2");
}

// Real-valued H x W grid, row-major.
struct Image {
    int h = 0;
    int w = 0;
    std::vector<double> v;

    Image() = default;
    Image(int hh, int ww, double fill = 0.0) : h(hh), w(ww) {
        require_shape(hh, ww, "Image");
        v.assign(size_t(hh) * ww, fill);
    }

    double& at(int r, int c) { return v[size_t(r) * w + c]; }
    double at(int r, int c) const { return v[size_t(r) * w + c]; }
    size_t size() const { return v.size(); }
};

// Complex H x W grid, row-major.
struct KSpace {
    int h = 0;
    int w = 0;
    std::vector<std::complex<double>> v;

    KSpace() = default;
    KSpace(int hh, int ww) : h(hh), w(ww) {
        require_shape(hh, ww, "KSpace");
        v.resize(size_t(hh) * ww);
    }

    std::complex<double>& at(int r, int c) { return v[size_t(r) * w + c]; }
    const std::complex<double>& at(int r, int c) const { return v[size_t(r) * w + c]; }
    size_t size() const { return v.size(); }
};

inline void require_finite(const Image& x, const char* who) {
    for (double d : x.v)
        if (!std::isfinite(d)) throw NumericError(std::string(who) + ": non-finite value in image");
}

inline void require_finite(const KSpace& k, const char* who) {
    for (const auto& z : k.v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NumericError(std::string(who) + ": non-finite value in k-space grid");
}

}  // namespace igs
