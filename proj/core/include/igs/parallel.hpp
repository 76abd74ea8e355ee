#pragma once

#include <functional>

namespace igs {

// Runs fn(i) for i in [0, n) on up to `jobs` threads using static contiguous
// chunks. Callers write into preallocated per-index slots and reduce in index
// order afterwards, so results are identical for any job count.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace igs
