#include "igs/oracle.hpp"

namespace igs {

std::vector<double> fd_mask_gradient(const std::vector<TrainSample>& data,
                                     const SamplingPattern& pat, const Head& head,
                                     const LossSpec& loss, double step, double eps_mag) {
    if (step <= 0 || step > 0.1) throw DataError("fd_mask_gradient: step must be in (0, 0.1]");
    std::vector<double> w(pat.selected.size());
    for (size_t i = 0; i < w.size(); ++i) w[i] = pat.selected[i] ? 1.0 : 0.0;
    std::vector<double> g(w.size());
    double n = double(data.size());  // summed dataset loss, matching mask_gradient
    for (size_t j = 0; j < w.size(); ++j) {
        std::vector<double> wp = w, wm = w;
        wp[j] += step;
        wm[j] -= step;
        double lp = n * mean_loss(data, wp, head, loss, eps_mag);
        double lm = n * mean_loss(data, wm, head, loss, eps_mag);
        g[j] = (lp - lm) / (2.0 * step);
    }
    return g;
}

GreedyStep exhaustive_greedy_step(const std::vector<TrainSample>& data,
                                  const SamplingPattern& pat, const Head& head,
                                  const LossSpec& loss, double eps_mag) {
    GreedyStep out;
    std::vector<double> w(pat.selected.size());
    for (size_t i = 0; i < w.size(); ++i) w[i] = pat.selected[i] ? 1.0 : 0.0;
    double best = 0;
    for (size_t j = 0; j < w.size(); ++j) {
        if (pat.selected[j]) continue;
        std::vector<double> wj = w;
        wj[j] = 1.0;
        double l = mean_loss(data, wj, head, loss, eps_mag);
        out.table.emplace_back(int(j), l);
        if (out.best < 0 || l < best) {
            out.best = int(j);
            best = l;
        }
    }
    if (out.best < 0) throw DataError("exhaustive_greedy_step: no unselected line left");
    return out;
}

}  // namespace igs
