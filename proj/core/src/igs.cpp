#include "igs/igs.hpp"

#include <algorithm>
#include <cmath>

#include "igs/grid.hpp"
#include "igs/parallel.hpp"

namespace igs {
namespace {

// One sample through the relaxed chain; gradient part is skipped when g_out
// is null (plain loss evaluation).
void sample_grad(const TrainSample& ts, const std::vector<double>& w, const Head& head,
                 const LossSpec& loss, double eps_mag, double* loss_out,
                 std::vector<double>* g_out) {
    if (ts.x.w != int(w.size())) throw DataError("pattern width does not match image width");
    KSpace K = fft2_unitary(ts.x);
    KSpace Km = K;
    for (int r = 0; r < Km.h; ++r)
        for (int c = 0; c < Km.w; ++c) Km.at(r, c) *= w[c];
    KSpace Z = ifft2_unitary(Km);
    Image xhat = magnitude_smooth(Z, eps_mag);
    std::vector<double> pred = head_forward(head, xhat);
    std::vector<double> y = target_for(head, loss, ts);
    LossResult lr = eval_loss(loss, y, pred);
    if (!std::isfinite(lr.value)) throw NumericError("igs: non-finite sample loss");
    *loss_out = lr.value;
    if (!g_out) return;
    Image gx = head_input_gradient(head, xhat, lr.grad);
    KSpace gz = magnitude_smooth_backward(Z, gx, eps_mag);
    KSpace gk = fft2_unitary(gz);  // adjoint of the unitary inverse transform
    g_out->assign(w.size(), 0.0);
    for (int r = 0; r < K.h; ++r)
        for (int c = 0; c < K.w; ++c)
            (*g_out)[c] += std::real(std::conj(K.at(r, c)) * gk.at(r, c));
}

// Mean loss and (optionally) the accumulated mask gradient over the dataset.
// Per-sample results land in index-addressed slots and are reduced in sample
// order, so the outcome does not depend on the job count.
double dataset_pass(const std::vector<TrainSample>& data, const std::vector<double>& w,
                    const Head& head, const LossSpec& loss, double eps_mag, int jobs,
                    std::vector<double>* g_out) {
    if (data.empty()) throw DataError("igs: empty dataset");
    int n = int(data.size());
    std::vector<double> losses(n);
    std::vector<std::vector<double>> grads(g_out ? n : 0);
    parallel_for(n, jobs, [&](int i) {
        sample_grad(data[i], w, head, loss, eps_mag, &losses[i], g_out ? &grads[i] : nullptr);
    });
    if (g_out) {
        // Sum, not mean: line selection is scale-invariant and the summed
        // form keeps per-sample additivity exact.
        g_out->assign(w.size(), 0.0);
        for (int i = 0; i < n; ++i)
            for (size_t j = 0; j < w.size(); ++j) {
                if (!std::isfinite(grads[i][j]))
                    throw NumericError("mask_gradient: non-finite gradient at sample " +
                                       std::to_string(i) + ", line " + std::to_string(j));
                (*g_out)[j] += grads[i][j];
            }
    }
    double tot = 0;
    for (double l : losses) tot += l;
    return tot / double(n);
}

std::vector<double> relaxed(const SamplingPattern& pat) {
    std::vector<double> w(pat.selected.size());
    for (size_t i = 0; i < w.size(); ++i) w[i] = pat.selected[i] ? 1.0 : 0.0;
    return w;
}

}  // namespace

std::vector<double> mask_gradient(const std::vector<TrainSample>& data,
                                  const SamplingPattern& pat, const Head& head,
                                  const LossSpec& loss, double eps_mag, int jobs) {
    std::vector<double> g;
    dataset_pass(data, relaxed(pat), head, loss, eps_mag, jobs, &g);
    return g;
}

double mean_loss(const std::vector<TrainSample>& data, const std::vector<double>& w,
                 const Head& head, const LossSpec& loss, double eps_mag, int jobs) {
    return dataset_pass(data, w, head, loss, eps_mag, jobs, nullptr);
}

double identity_consistency_ratio(const std::vector<double>& grad, const SamplingPattern& pat) {
    double scale = 0;
    for (double v : grad) scale = std::max(scale, std::abs(v));
    if (scale <= 0) return 0.0;
    double worst = 0;
    for (size_t j = 0; j < grad.size(); ++j)
        if (!pat.selected[j] && grad[j] > 0) worst = std::max(worst, grad[j] / scale);
    return worst;
}

int igs_select_line(const std::vector<double>& grad, const SamplingPattern& pat) {
    if (grad.size() != pat.selected.size())
        throw DataError("igs_select_line: gradient/pattern width mismatch");
    int best = -1;
    double bv = 0;
    for (size_t j = 0; j < grad.size(); ++j) {
        if (pat.selected[j]) continue;
        if (best < 0 || grad[j] < bv) {
            best = int(j);
            bv = grad[j];
        }
    }
    if (best < 0) throw DataError("igs_select_line: no unselected line left");
    return best;
}

std::pair<SamplingPattern, IgsTrace> igs_run(const std::vector<TrainSample>& data,
                                             const Head& head, const IgsConfig& cfg) {
    if (data.empty()) throw DataError("igs_run: empty dataset");
    int width = data[0].x.w;
    for (const auto& ts : data)
        if (ts.x.w != width || ts.x.h != data[0].x.h)
            throw DataError("igs_run: inconsistent sample shapes");
    if (cfg.budget < 1 || cfg.budget > width) throw DataError("igs_run: budget out of range");

    // batch_limit > 0 restricts every iteration to the same leading slice,
    // keeping the run deterministic.
    size_t use = cfg.batch_limit > 0 ? std::min(size_t(cfg.batch_limit), data.size())
                                     : data.size();
    std::vector<TrainSample> sub;
    const std::vector<TrainSample>& eff =
        use == data.size() ? data : (sub.assign(data.begin(), data.begin() + use), sub);

    SamplingPattern pat;
    pat.width = width;
    pat.selected.assign(width, 0);
    int center = width / 2;
    pat.selected[center] = 1;
    pat.transition_log.push_back(center);

    bool check_identity =
        head.kind == HeadKind::IdentityRecon && cfg.loss.kind == LossKind::L1;
    IgsTrace trace;
    for (int step = 1; step < cfg.budget; ++step) {
        IgsTraceRow row;
        std::vector<double> g;
        row.mean_loss_before =
            dataset_pass(eff, relaxed(pat), head, cfg.loss, cfg.eps_mag, cfg.jobs, &g);
        if (check_identity) {
            double ratio = identity_consistency_ratio(g, pat);
            if (ratio > kIdentityConsistencyTol)
                throw NumericError(
                    "igs_run: identity-consistency violation at step " + std::to_string(step) +
                    ": positive unselected-line gradient at " + std::to_string(ratio) +
                    " of the gradient scale (threshold " +
                    std::to_string(kIdentityConsistencyTol) + ")");
        }
        int chosen = igs_select_line(g, pat);
        row.chosen = chosen;
        if (cfg.record_grads) row.grad = std::move(g);
        trace.rows.push_back(std::move(row));
        pat.selected[chosen] = 1;
        pat.transition_log.push_back(chosen);
    }
    trace.final_mean_loss = mean_loss(eff, relaxed(pat), head, cfg.loss, cfg.eps_mag, cfg.jobs);
    return {std::move(pat), std::move(trace)};
}

}  // namespace igs
