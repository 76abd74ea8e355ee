#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace igs {

// Deterministic random source. mt19937_64 has a standard-pinned output
// sequence, and every derived draw below is hand-rolled so that streams are
// identical across platforms and standard libraries (std::uniform_* and
// std::normal_distribution are implementation-defined).
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    // [0, 1) with 53 random bits.
    double uniform01() { return double(eng_() >> 11) * 0x1p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // [0, n) without modulo bias.
    uint64_t below(uint64_t n) {
        if (n == 0) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    // [lo, hi) like the usual half-open integer range.
    int64_t integers(int64_t lo, int64_t hi) { return lo + int64_t(below(uint64_t(hi - lo))); }

    // Box-Muller with a cached spare.
    double normal(double mu = 0.0, double sigma = 1.0) {
        if (has_spare_) {
            has_spare_ = false;
            return mu + sigma * spare_;
        }
        double u1, u2;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * M_PI * u2;
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return mu + sigma * r * std::cos(th);
    }

    // Fisher-Yates.
    template <class T>
    void shuffle(std::vector<T>& xs) {
        for (size_t i = xs.size(); i > 1; --i) {
            size_t j = size_t(below(uint64_t(i)));
            std::swap(xs[i - 1], xs[j]);
        }
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace igs
