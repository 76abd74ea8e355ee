#include "igs/parallel.hpp"

#include <algorithm>
#include <mutex>
#include <thread>
#include <vector>

namespace igs {

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int J = std::max(1, std::min(jobs, n));
    if (J == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    // Static contiguous chunks; with index-addressed outputs the caller sees
    // the same result for any J.
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex emu;
    int base = n / J, rem = n % J, start = 0;
    for (int t = 0; t < J; ++t) {
        int len = base + (t < rem ? 1 : 0);
        int s = start, e = start + len;
        start = e;
        pool.emplace_back([&, s, e] {
            try {
                for (int i = s; i < e; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(emu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace igs
