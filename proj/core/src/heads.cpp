#include "igs/heads.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "igs/rng.hpp"

namespace igs {
namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Zero-padded input copy; border handling then disappears from the hot loops.
void fill_padded(const Image& img, int pad, std::vector<double>& out) {
    int ph = img.h + 2 * pad, pw = img.w + 2 * pad;
    out.assign(size_t(ph) * pw, 0.0);
    for (int r = 0; r < img.h; ++r) {
        const double* src = img.v.data() + size_t(r) * img.w;
        double* dst = out.data() + size_t(r + pad) * pw + pad;
        std::copy(src, src + img.w, dst);
    }
}

struct TrunkState {
    std::vector<double> pad;  // padded input
    std::vector<double> act;  // C post-ReLU maps, channel-major
    std::vector<double> z;    // combined 1x1 output
};

// conv(k x k, C) -> ReLU -> 1x1: fills act and z.
void trunk_forward(const ConvHeadParams& p, const Image& img, TrunkState& st) {
    int H = img.h, W = img.w, k = p.k, pad = k / 2, pw = W + 2 * pad;
    fill_padded(img, pad, st.pad);
    st.act.assign(size_t(p.C) * H * W, 0.0);
    st.z.assign(size_t(H) * W, p.b2);
    for (int c = 0; c < p.C; ++c) {
        const double* ker = p.w1.data() + size_t(c) * k * k;
        double* amap = st.act.data() + size_t(c) * H * W;
        double bias = p.b1[c];
        for (int i = 0; i < H; ++i) {
            double* arow = amap + size_t(i) * W;
            for (int a = 0; a < k; ++a) {
                const double* prow = st.pad.data() + size_t(i + a) * pw;
                for (int b = 0; b < k; ++b) {
                    double kv = ker[a * k + b];
                    const double* ps = prow + b;
                    for (int j = 0; j < W; ++j) arow[j] += kv * ps[j];
                }
            }
            for (int j = 0; j < W; ++j) {
                double v = arow[j] + bias;
                arow[j] = v > 0 ? v : 0.0;
            }
        }
        double wc = p.w2[c];
        for (size_t i = 0; i < st.z.size(); ++i) st.z[i] += wc * amap[i];
    }
}

// dL/dz -> (optional) input gradient and (optional) parameter gradients.
void trunk_backward(const ConvHeadParams& p, const Image& img, const TrunkState& st,
                    const std::vector<double>& dz, Image* dinput, std::vector<double>* dw1,
                    std::vector<double>* db1, std::vector<double>* dw2, double* db2) {
    int H = img.h, W = img.w, k = p.k, pad = k / 2, pw = W + 2 * pad;
    std::vector<double> da(size_t(H) * W);
    std::vector<double> dpad;
    if (dinput) dpad.assign(size_t(H + 2 * pad) * pw, 0.0);
    if (db2) *db2 += std::accumulate(dz.begin(), dz.end(), 0.0);
    for (int c = 0; c < p.C; ++c) {
        const double* amap = st.act.data() + size_t(c) * H * W;
        double wc = p.w2[c];
        double dot = 0;
        for (size_t i = 0; i < dz.size(); ++i) {
            dot += dz[i] * amap[i];
            da[i] = amap[i] > 0 ? wc * dz[i] : 0.0;
        }
        if (dw2) (*dw2)[c] += dot;
        if (db1) (*db1)[c] += std::accumulate(da.begin(), da.end(), 0.0);
        if (dw1) {
            double* dker = dw1->data() + size_t(c) * k * k;
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) {
                    double acc = 0;
                    for (int i = 0; i < H; ++i) {
                        const double* drow = da.data() + size_t(i) * W;
                        const double* prow = st.pad.data() + size_t(i + a) * pw + b;
                        for (int j = 0; j < W; ++j) acc += drow[j] * prow[j];
                    }
                    dker[a * k + b] += acc;
                }
        }
        if (dinput) {
            const double* ker = p.w1.data() + size_t(c) * k * k;
            for (int i = 0; i < H; ++i) {
                const double* drow = da.data() + size_t(i) * W;
                for (int a = 0; a < k; ++a) {
                    double* prow = dpad.data() + size_t(i + a) * pw;
                    for (int b = 0; b < k; ++b) {
                        double kv = ker[a * k + b];
                        double* ps = prow + b;
                        for (int j = 0; j < W; ++j) ps[j] += kv * drow[j];
                    }
                }
            }
        }
    }
    if (dinput) {
        *dinput = Image(H, W);
        for (int r = 0; r < H; ++r) {
            const double* src = dpad.data() + size_t(r + pad) * pw + pad;
            std::copy(src, src + W, dinput->v.data() + size_t(r) * W);
        }
    }
}

// dL/d(prediction) -> dL/dz for the two conv heads.
std::vector<double> upstream_to_dz(const Head& head, const TrunkState& st,
                                   const std::vector<double>& upstream) {
    size_t n = st.z.size();
    std::vector<double> dz(n);
    if (head.kind == HeadKind::ConvSegmenter) {
        if (upstream.size() != n) throw DataError("head gradient: upstream shape mismatch");
        for (size_t i = 0; i < n; ++i) {
            double s = sigmoid(st.z[i]);
            dz[i] = upstream[i] * s * (1.0 - s);
        }
    } else {  // ConvClassifier: prediction (p, 1-p) with p = sigmoid(mean z)
        if (upstream.size() != 2) throw DataError("head gradient: upstream shape mismatch");
        double zbar = std::accumulate(st.z.begin(), st.z.end(), 0.0) / double(n);
        double s = sigmoid(zbar);
        double dzbar = (upstream[0] - upstream[1]) * s * (1.0 - s);
        std::fill(dz.begin(), dz.end(), dzbar / double(n));
    }
    return dz;
}

}  // namespace

Head make_head(HeadKind kind, uint64_t seed, int C, int k) {
    Head h;
    h.kind = kind;
    if (kind == HeadKind::IdentityRecon) return h;
    if (C < 1 || k < 1 || k % 2 == 0) throw DataError("make_head: C >= 1 and odd k required");
    h.p.C = C;
    h.p.k = k;
    double bound = 1.0 / std::sqrt(double(k) * k);
    Rng rng(seed);
    h.p.w1.resize(size_t(C) * k * k);
    for (auto& w : h.p.w1) w = rng.uniform(-bound, bound);
    h.p.b1.assign(C, 0.0);
    h.p.w2.resize(C);
    for (auto& w : h.p.w2) w = rng.uniform(-bound, bound);
    h.p.b2 = 0.0;
    return h;
}

std::vector<double> head_forward(const Head& head, const Image& img) {
    require_finite(img, "head_forward");
    if (head.kind == HeadKind::IdentityRecon) return img.v;
    TrunkState st;
    trunk_forward(head.p, img, st);
    if (head.kind == HeadKind::ConvSegmenter) {
        std::vector<double> out(st.z.size());
        for (size_t i = 0; i < st.z.size(); ++i) out[i] = sigmoid(st.z[i]);
        return out;
    }
    double zbar = std::accumulate(st.z.begin(), st.z.end(), 0.0) / double(st.z.size());
    double pr = sigmoid(zbar);
    return {pr, 1.0 - pr};
}

Image head_input_gradient(const Head& head, const Image& img,
                          const std::vector<double>& upstream) {
    if (head.kind == HeadKind::IdentityRecon) {
        if (upstream.size() != img.size())
            throw DataError("head_input_gradient: upstream shape mismatch");
        Image g(img.h, img.w);
        g.v = upstream;
        return g;
    }
    TrunkState st;
    trunk_forward(head.p, img, st);
    std::vector<double> dz = upstream_to_dz(head, st, upstream);
    Image dinput;
    trunk_backward(head.p, img, st, dz, &dinput, nullptr, nullptr, nullptr, nullptr);
    return dinput;
}

void AdamState::update(std::vector<double>& theta, const std::vector<double>& g) {
    if (m.size() != theta.size()) init(theta.size());
    ++step;
    double bc1 = 1.0 - std::pow(beta1, double(step));
    double bc2 = 1.0 - std::pow(beta2, double(step));
    for (size_t i = 0; i < theta.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        theta[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
}

std::vector<double> target_for(const Head& head, const LossSpec& loss, const TrainSample& s) {
    (void)loss;
    if (head.kind == HeadKind::ConvClassifier) return {s.ypair[0], s.ypair[1]};
    return s.ygrid.v;
}

TrainResult train_head(Head& head, const std::vector<TrainSample>& data, const LossSpec& loss,
                       int epochs, int batch, uint64_t seed, int patience) {
    if (data.empty()) throw DataError("train_head: empty dataset");
    if (batch < 1) throw DataError("train_head: batch must be >= 1");
    if (head.kind == HeadKind::IdentityRecon)
        throw DataError("train_head: identity head has no parameters");

    const int C = head.p.C, k = head.p.k;
    size_t n_par = head.p.param_count();
    auto flatten = [&](std::vector<double>& th) {
        th.clear();
        th.insert(th.end(), head.p.w1.begin(), head.p.w1.end());
        th.insert(th.end(), head.p.b1.begin(), head.p.b1.end());
        th.insert(th.end(), head.p.w2.begin(), head.p.w2.end());
        th.push_back(head.p.b2);
    };
    auto unflatten = [&](const std::vector<double>& th) {
        size_t o = 0;
        std::copy(th.begin() + o, th.begin() + o + head.p.w1.size(), head.p.w1.begin());
        o += head.p.w1.size();
        std::copy(th.begin() + o, th.begin() + o + C, head.p.b1.begin());
        o += C;
        std::copy(th.begin() + o, th.begin() + o + C, head.p.w2.begin());
        o += C;
        head.p.b2 = th[o];
    };

    AdamState adam;
    adam.init(n_par);
    std::vector<double> theta;
    flatten(theta);

    Rng rng(seed);
    std::vector<int> perm(data.size());
    std::iota(perm.begin(), perm.end(), 0);

    TrainResult res;
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    TrunkState st;
    std::vector<double> gw1(size_t(C) * k * k), gb1(C), gw2(C);
    std::vector<double> grad(n_par);

    for (int ep = 0; ep < epochs; ++ep) {
        rng.shuffle(perm);
        double ep_loss = 0;
        for (size_t bi = 0; bi < perm.size(); bi += batch) {
            size_t be = std::min(perm.size(), bi + batch);
            double inv = 1.0 / double(be - bi);
            std::fill(gw1.begin(), gw1.end(), 0.0);
            std::fill(gb1.begin(), gb1.end(), 0.0);
            std::fill(gw2.begin(), gw2.end(), 0.0);
            double gb2 = 0;
            double batch_loss = 0;
            for (size_t s = bi; s < be; ++s) {
                const TrainSample& ts = data[perm[s]];
                trunk_forward(head.p, ts.x, st);
                std::vector<double> pred;
                if (head.kind == HeadKind::ConvSegmenter) {
                    pred.resize(st.z.size());
                    for (size_t i = 0; i < st.z.size(); ++i) pred[i] = sigmoid(st.z[i]);
                } else {
                    double zbar =
                        std::accumulate(st.z.begin(), st.z.end(), 0.0) / double(st.z.size());
                    double pr = sigmoid(zbar);
                    pred = {pr, 1.0 - pr};
                }
                std::vector<double> y = target_for(head, loss, ts);
                LossResult lr = eval_loss(loss, y, pred);
                if (!std::isfinite(lr.value))
                    throw NumericError("train_head: non-finite loss at epoch " +
                                       std::to_string(ep));
                batch_loss += lr.value;
                for (auto& g : lr.grad) g *= inv;
                std::vector<double> dz = upstream_to_dz(head, st, lr.grad);
                trunk_backward(head.p, ts.x, st, dz, nullptr, &gw1, &gb1, &gw2, &gb2);
            }
            size_t o = 0;
            std::copy(gw1.begin(), gw1.end(), grad.begin() + o);
            o += gw1.size();
            std::copy(gb1.begin(), gb1.end(), grad.begin() + o);
            o += gb1.size();
            std::copy(gw2.begin(), gw2.end(), grad.begin() + o);
            o += gw2.size();
            grad[o] = gb2;
            adam.update(theta, grad);
            unflatten(theta);
            ep_loss += batch_loss;
        }
        res.curve.push_back(ep_loss / double(data.size()));
        ++res.epochs_run;
        if (patience > 0) {
            if (res.curve.back() < best - 1e-12) {
                best = res.curve.back();
                since_best = 0;
            } else if (++since_best >= patience) {
                break;
            }
        }
    }
    return res;
}

}  // namespace igs
