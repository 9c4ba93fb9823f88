#pragma once

#include <array>
#include <type_traits>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lczmap/error.hpp"
#include "lczmap/labelmap.hpp"
#include "lczmap/rng.hpp"
#include "lczmap/sampling.hpp"
#include "lczmap/tensor.hpp"

namespace lcz {

// Layer templates. Everything is parameterized on the scalar type: float
// for training and inference, double for the finite-difference checks.

template <class T>
struct ConvLayerT {
    int k = 0, in_ch = 0, out_ch = 0;
    std::vector<T> w; // [a][b][c_in][c_out]
    std::vector<T> b; // [c_out]

    void resize(int kk, int cin, int cout) {
        k = kk;
        in_ch = cin;
        out_ch = cout;
        w.assign(static_cast<std::size_t>(kk) * kk * cin * cout, T(0));
        b.assign(cout, T(0));
    }
    std::size_t widx(int a, int bb, int c, int f) const {
        return ((static_cast<std::size_t>(a) * k + bb) * in_ch + c) * out_ch + f;
    }
    void zero() {
        std::fill(w.begin(), w.end(), T(0));
        std::fill(b.begin(), b.end(), T(0));
    }
};

template <class T>
struct DenseLayerT {
    int out = 0, in = 0;
    std::vector<T> w; // out x in, row-major
    std::vector<T> b; // out

    void resize(int o, int i) {
        out = o;
        in = i;
        w.assign(static_cast<std::size_t>(o) * i, T(0));
        b.assign(o, T(0));
    }
    void zero() {
        std::fill(w.begin(), w.end(), T(0));
        std::fill(b.begin(), b.end(), T(0));
    }
};

/// Valid-padding cross-correlation: out[i,j,f] = b[f] + sum over the kxk
/// window of x . kernel. The accumulation order over (a,b,c) is fixed, so
/// a patch and the matching window of a larger image produce bit-identical
/// results.
template <class T>
Tensor3T<T> conv_forward(const Tensor3T<T>& x, const ConvLayerT<T>& L) {
    require(x.channels == L.in_ch, Errc::invalid, "conv channel mismatch");
    require(x.rows >= L.k && x.cols >= L.k, Errc::invalid, "conv input smaller than kernel");
    const int H = x.rows - L.k + 1, W = x.cols - L.k + 1;
    const int C = L.in_ch, F = L.out_ch, k = L.k;
    Tensor3T<T> out(H, W, F);
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j) {
            T* o = &out.v[out.index(i, j, 0)];
            for (int f = 0; f < F; ++f) o[f] = L.b[f];
            for (int a = 0; a < k; ++a) {
                const T* xrow = &x.v[x.index(i + a, j, 0)];
                for (int bb = 0; bb < k; ++bb) {
                    const T* xp = xrow + static_cast<std::size_t>(bb) * C;
                    const T* kp = &L.w[L.widx(a, bb, 0, 0)];
                    for (int c = 0; c < C; ++c) {
                        const T xv = xp[c];
                        const T* kf = kp + static_cast<std::size_t>(c) * F;
                        for (int f = 0; f < F; ++f) o[f] += xv * kf[f];
                    }
                }
            }
        }
    return out;
}

/// Gradients of conv_forward. dx may be null when the input gradient is not
/// needed (first layer). dw/db are accumulated into (callers zero them).
template <class T>
void conv_backward(const Tensor3T<T>& x, const ConvLayerT<T>& L, const Tensor3T<T>& dout,
                   ConvLayerT<T>& dL, std::type_identity_t<Tensor3T<T>>* dx) {
    const int H = dout.rows, W = dout.cols, C = L.in_ch, F = L.out_ch, k = L.k;
    if (dx) std::fill(dx->v.begin(), dx->v.end(), T(0));
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j) {
            const T* dof = &dout.v[dout.index(i, j, 0)];
            for (int f = 0; f < F; ++f) dL.b[f] += dof[f];
            for (int a = 0; a < k; ++a)
                for (int bb = 0; bb < k; ++bb) {
                    const T* xp = &x.v[x.index(i + a, j + bb, 0)];
                    T* dwp = &dL.w[dL.widx(a, bb, 0, 0)];
                    T* dxp = dx ? &dx->v[dx->index(i + a, j + bb, 0)] : nullptr;
                    const T* kp = &L.w[L.widx(a, bb, 0, 0)];
                    for (int c = 0; c < C; ++c) {
                        const T xv = xp[c];
                        T* dwf = dwp + static_cast<std::size_t>(c) * F;
                        T acc = T(0);
                        const T* kf = kp + static_cast<std::size_t>(c) * F;
                        for (int f = 0; f < F; ++f) {
                            dwf[f] += xv * dof[f];
                            acc += kf[f] * dof[f];
                        }
                        if (dxp) dxp[c] += acc;
                    }
                }
        }
}

template <class T>
Tensor3T<T> relu(const Tensor3T<T>& x) {
    Tensor3T<T> out = x;
    for (T& v : out.v) v = v > T(0) ? v : T(0);
    return out;
}

/// 3x3 window, stride 2, per channel; records the argmax flat index of the
/// input tensor for the backward pass.
template <class T>
Tensor3T<T> maxpool_forward(const Tensor3T<T>& x, std::vector<std::int32_t>* argmax) {
    require(x.rows >= 3 && x.cols >= 3, Errc::invalid, "maxpool input smaller than its window");
    const int P = (x.rows - 3) / 2 + 1, Q = (x.cols - 3) / 2 + 1, C = x.channels;
    Tensor3T<T> out(P, Q, C);
    if (argmax) argmax->assign(out.size(), -1);
    for (int u = 0; u < P; ++u)
        for (int v = 0; v < Q; ++v)
            for (int c = 0; c < C; ++c) {
                T best = x.at(2 * u, 2 * v, c);
                std::size_t best_idx = x.index(2 * u, 2 * v, c);
                for (int a = 0; a < 3; ++a)
                    for (int bb = 0; bb < 3; ++bb) {
                        T cand = x.at(2 * u + a, 2 * v + bb, c);
                        if (cand > best) {
                            best = cand;
                            best_idx = x.index(2 * u + a, 2 * v + bb, c);
                        }
                    }
                out.at(u, v, c) = best;
                if (argmax) (*argmax)[out.index(u, v, c)] = static_cast<std::int32_t>(best_idx);
            }
    return out;
}

template <class T>
void maxpool_backward(const Tensor3T<T>& dout, const std::vector<std::int32_t>& argmax,
                      Tensor3T<T>& dx) {
    std::fill(dx.v.begin(), dx.v.end(), T(0));
    for (std::size_t i = 0; i < dout.v.size(); ++i) dx.v[argmax[i]] += dout.v[i];
}

/// Stride-1 3x3 max filter; the sliding-window pooling used by full-map
/// inference, where every stride-2 pool grid of every patch is a subset of
/// this map.
template <class T>
Tensor3T<T> maxfilter3(const Tensor3T<T>& x) {
    require(x.rows >= 3 && x.cols >= 3, Errc::invalid, "max filter input too small");
    const int H = x.rows - 2, W = x.cols - 2, C = x.channels;
    Tensor3T<T> out(H, W, C);
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j)
            for (int c = 0; c < C; ++c) {
                T best = x.at(i, j, c);
                for (int a = 0; a < 3; ++a)
                    for (int bb = 0; bb < 3; ++bb) {
                        T cand = x.at(i + a, j + bb, c);
                        if (cand > best) best = cand;
                    }
                out.at(i, j, c) = best;
            }
    return out;
}

template <class T>
std::vector<T> dense_forward(const std::vector<T>& v, const DenseLayerT<T>& L) {
    require(static_cast<int>(v.size()) == L.in, Errc::invalid, "dense input dim mismatch");
    std::vector<T> out(L.out);
    for (int o = 0; o < L.out; ++o) {
        const T* wr = &L.w[static_cast<std::size_t>(o) * L.in];
        T acc = L.b[o];
        for (int i = 0; i < L.in; ++i) acc += wr[i] * v[i];
        out[o] = acc;
    }
    return out;
}

template <class T>
void dense_backward(const std::vector<T>& v, const DenseLayerT<T>& L, const std::vector<T>& dout,
                    DenseLayerT<T>& dL, std::type_identity_t<std::vector<T>>* dv) {
    if (dv) dv->assign(L.in, T(0));
    for (int o = 0; o < L.out; ++o) {
        const T g = dout[o];
        dL.b[o] += g;
        T* dwr = &dL.w[static_cast<std::size_t>(o) * L.in];
        const T* wr = &L.w[static_cast<std::size_t>(o) * L.in];
        for (int i = 0; i < L.in; ++i) {
            dwr[i] += g * v[i];
            if (dv) (*dv)[i] += g * wr[i];
        }
    }
}

/// Max-shifted softmax; exact shift invariance and overflow safety.
template <class T>
std::vector<T> softmax(const std::vector<T>& logits) {
    require(!logits.empty(), Errc::invalid, "softmax on empty vector");
    T mx = logits[0];
    for (T v : logits) {
        require(std::isfinite(static_cast<double>(v)), Errc::numeric, "non-finite logit");
        if (v > mx) mx = v;
    }
    std::vector<T> out(logits.size());
    T sum = T(0);
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (T& v : out) v /= sum;
    return out;
}

/// Inverted dropout on a flat buffer: units are zeroed with probability
/// rate, survivors are scaled by 1/(1-rate) so inference is the identity.
/// mask (if given) records survivors for the backward pass.
template <class T>
void dropout_forward(std::vector<T>& values, double rate, bool train_mode, Rng* rng,
                     std::vector<std::uint8_t>* mask) {
    require(rate >= 0.0 && rate < 1.0, Errc::invalid, "dropout rate must be in [0,1)");
    if (mask) mask->assign(values.size(), 1);
    if (!train_mode || rate == 0.0) return;
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (rng->next_unit() < rate) {
            values[i] = T(0);
            if (mask) (*mask)[i] = 0;
        } else {
            values[i] *= scale;
        }
    }
}

template <class T>
void dropout_backward(std::vector<T>& grad, double rate, const std::vector<std::uint8_t>& mask) {
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = mask[i] ? grad[i] * scale : T(0);
}

// ---------------------------------------------------------------------------
// The fixed patch-classification network:
// Conv(32) -> ReLU -> Conv(64) -> ReLU -> MaxPool(3, stride 2) ->
// Dropout(0.5) -> Flatten -> Dense(128) -> ReLU -> Dropout(0.25) ->
// Dense(14) -> Softmax.

constexpr double kDropoutPool = 0.5;
constexpr double kDropoutDense = 0.25;
constexpr int kConv1Filters = 32;
constexpr int kConv2Filters = 64;
constexpr int kDenseHidden = 128;

template <class T>
struct CnnModelT {
    int k = 3;
    int conv1_side = 0, conv2_side = 0, pool_side = 0, flat_size = 0;
    ConvLayerT<T> conv1, conv2;
    DenseLayerT<T> fc1, fc2;

    template <class U>
    CnnModelT<U> cast() const {
        CnnModelT<U> m;
        m.k = k;
        m.conv1_side = conv1_side;
        m.conv2_side = conv2_side;
        m.pool_side = pool_side;
        m.flat_size = flat_size;
        m.conv1.resize(k, kPatchBands, kConv1Filters);
        m.conv2.resize(k, kConv1Filters, kConv2Filters);
        m.fc1.resize(kDenseHidden, flat_size);
        m.fc2.resize(kClassCount, kDenseHidden);
        auto cp = [](const std::vector<T>& a, std::vector<U>& b) {
            for (std::size_t i = 0; i < a.size(); ++i) b[i] = static_cast<U>(a[i]);
        };
        cp(conv1.w, m.conv1.w);
        cp(conv1.b, m.conv1.b);
        cp(conv2.w, m.conv2.w);
        cp(conv2.b, m.conv2.b);
        cp(fc1.w, m.fc1.w);
        cp(fc1.b, m.fc1.b);
        cp(fc2.w, m.fc2.w);
        cp(fc2.b, m.fc2.b);
        return m;
    }
};

using CnnModel = CnnModelT<float>;

/// He-initialized model for kernel size k in {1,3,5}; asserts the full
/// shape chain during construction (for k=3: 9x9x32, 7x7x64, 3x3x64, 576,
/// 128, 14).
template <class T>
CnnModelT<T> build_model(int k, std::uint64_t seed) {
    require(k == 1 || k == 3 || k == 5, Errc::invalid, "kernel size must be 1, 3 or 5");
    CnnModelT<T> m;
    m.k = k;
    m.conv1_side = kPatchSide - k + 1;
    m.conv2_side = m.conv1_side - k + 1;
    require(m.conv2_side >= 3, Errc::invalid, "kernel size leaves no room for pooling");
    m.pool_side = (m.conv2_side - 3) / 2 + 1;
    m.flat_size = m.pool_side * m.pool_side * kConv2Filters;

    // Shape chain contract for the canonical kernel.
    if (k == 3) {
        require(m.conv1_side == 9 && m.conv2_side == 7 && m.pool_side == 3 && m.flat_size == 576,
                Errc::invalid, "shape chain broken for k=3");
    }

    m.conv1.resize(k, kPatchBands, kConv1Filters);
    m.conv2.resize(k, kConv1Filters, kConv2Filters);
    m.fc1.resize(kDenseHidden, m.flat_size);
    m.fc2.resize(kClassCount, kDenseHidden);

    Rng rng(seed);
    auto he_fill = [&rng](std::vector<T>& w, int fan_in) {
        const double s = std::sqrt(2.0 / fan_in);
        for (T& v : w) v = static_cast<T>(s * rng.next_normal());
    };
    he_fill(m.conv1.w, k * k * kPatchBands);
    he_fill(m.conv2.w, k * k * kConv1Filters);
    he_fill(m.fc1.w, m.flat_size);
    he_fill(m.fc2.w, kDenseHidden);
    return m;
}

/// Parameter tensors in serialization order.
template <class T>
std::vector<std::vector<T>*> model_params(CnnModelT<T>& m) {
    return {&m.conv1.w, &m.conv1.b, &m.conv2.w, &m.conv2.b, &m.fc1.w, &m.fc1.b, &m.fc2.w, &m.fc2.b};
}

template <class T>
struct CnnGradients {
    ConvLayerT<T> conv1, conv2;
    DenseLayerT<T> fc1, fc2;

    static CnnGradients like(const CnnModelT<T>& m) {
        CnnGradients g;
        g.conv1.resize(m.k, kPatchBands, kConv1Filters);
        g.conv2.resize(m.k, kConv1Filters, kConv2Filters);
        g.fc1.resize(kDenseHidden, m.flat_size);
        g.fc2.resize(kClassCount, kDenseHidden);
        return g;
    }
    void zero() {
        conv1.zero();
        conv2.zero();
        fc1.zero();
        fc2.zero();
    }
    std::vector<std::vector<T>*> params() {
        return {&conv1.w, &conv1.b, &conv2.w, &conv2.b, &fc1.w, &fc1.b, &fc2.w, &fc2.b};
    }
};

/// Per-sample forward state kept for the backward pass. The dropout masks
/// drawn in the forward pass are reused verbatim going backward.
template <class T>
struct CnnWork {
    Tensor3T<T> z1, a1, z2, a2, pooled;
    std::vector<std::int32_t> pool_argmax;
    std::vector<std::uint8_t> mask_pool, mask_dense;
    std::vector<T> flat, z3, a3, logits, probs;
};

/// Forward pass through the whole stack. When train_dropout is true, rng
/// must be non-null and supplies the two dropout masks.
template <class T>
void cnn_forward(const CnnModelT<T>& m, const Tensor3T<T>& x, bool train_dropout, Rng* rng,
                 CnnWork<T>& w) {
    require(x.rows == kPatchSide && x.cols == kPatchSide && x.channels == kPatchBands,
            Errc::invalid, "patch has wrong dims");
    w.z1 = conv_forward(x, m.conv1);
    w.a1 = relu(w.z1);
    w.z2 = conv_forward(w.a1, m.conv2);
    w.a2 = relu(w.z2);
    w.pooled = maxpool_forward(w.a2, &w.pool_argmax);

    w.flat = w.pooled.v; // dropout then flatten; elementwise, so one buffer
    dropout_forward(w.flat, kDropoutPool, train_dropout, rng, &w.mask_pool);

    w.z3 = dense_forward(w.flat, m.fc1);
    w.a3 = w.z3;
    for (T& v : w.a3) v = v > T(0) ? v : T(0);
    dropout_forward(w.a3, kDropoutDense, train_dropout, rng, &w.mask_dense);

    w.logits = dense_forward(w.a3, m.fc2);
    w.probs = softmax(w.logits);
}

/// Cross-entropy loss and parameter gradients for one sample; gradients are
/// accumulated into g. Returns -log p[label].
template <class T>
T cnn_sample_backprop(const CnnModelT<T>& m, const Tensor3T<T>& x, int label, bool train_dropout,
                      Rng* rng, CnnWork<T>& w, CnnGradients<T>& g) {
    require(label >= 0 && label < kClassCount, Errc::invalid, "label out of range");
    cnn_forward(m, x, train_dropout, rng, w);

    const T p = w.probs[label];
    T loss = -std::log(p);

    // softmax + cross-entropy: dlogits = p - onehot(label)
    std::vector<T> dlogits = w.probs;
    dlogits[label] -= T(1);

    std::vector<T> da3;
    dense_backward(w.a3, m.fc2, dlogits, g.fc2, &da3);
    if (train_dropout) dropout_backward(da3, kDropoutDense, w.mask_dense);
    for (std::size_t i = 0; i < da3.size(); ++i)
        if (w.z3[i] <= T(0)) da3[i] = T(0);

    std::vector<T> dflat;
    dense_backward(w.flat, m.fc1, da3, g.fc1, &dflat);
    if (train_dropout) dropout_backward(dflat, kDropoutPool, w.mask_pool);

    Tensor3T<T> dpool(m.pool_side, m.pool_side, kConv2Filters);
    dpool.v = dflat;
    Tensor3T<T> da2(m.conv2_side, m.conv2_side, kConv2Filters);
    maxpool_backward(dpool, w.pool_argmax, da2);
    for (std::size_t i = 0; i < da2.v.size(); ++i)
        if (w.z2.v[i] <= T(0)) da2.v[i] = T(0);

    Tensor3T<T> da1(m.conv1_side, m.conv1_side, kConv1Filters);
    conv_backward(w.a1, m.conv2, da2, g.conv2, &da1);
    for (std::size_t i = 0; i < da1.v.size(); ++i)
        if (w.z1.v[i] <= T(0)) da1.v[i] = T(0);
    conv_backward(x, m.conv1, da1, g.conv1, nullptr);
    return loss;
}

/// Mean loss over a batch with dropout off; the objective probed by the
/// finite-difference gradient check.
template <class T>
T cnn_batch_loss(const CnnModelT<T>& m, const std::vector<Tensor3T<T>>& xs,
                 const std::vector<int>& labels) {
    require(xs.size() == labels.size() && !xs.empty(), Errc::invalid, "bad batch");
    CnnWork<T> w;
    T total = T(0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        cnn_forward(m, xs[i], false, nullptr, w);
        total += -std::log(w.probs[labels[i]]);
    }
    return total / static_cast<T>(xs.size());
}

/// Analytic gradients of cnn_batch_loss (dropout off).
template <class T>
T cnn_batch_backprop(const CnnModelT<T>& m, const std::vector<Tensor3T<T>>& xs,
                     const std::vector<int>& labels, CnnGradients<T>& g) {
    require(xs.size() == labels.size() && !xs.empty(), Errc::invalid, "bad batch");
    g.zero();
    CnnWork<T> w;
    T total = T(0);
    for (std::size_t i = 0; i < xs.size(); ++i)
        total += cnn_sample_backprop(m, xs[i], labels[i], false, nullptr, w, g);
    const T inv = T(1) / static_cast<T>(xs.size());
    for (auto* p : g.params())
        for (T& v : *p) v *= inv;
    return total / static_cast<T>(xs.size());
}

// ---------------------------------------------------------------------------
// Training.

enum class Optimizer { adam = 0, sgd = 1 };

struct TrainConfig {
    int epochs = 300;
    int batch = 32;
    float learning_rate = 1e-3f;
    Optimizer optimizer = Optimizer::adam;
    std::uint64_t seed = 0;
    bool dropout = true;
    int threads = 1; // intra-batch workers; any value reproduces the 1-thread result

    void validate() const {
        require(epochs > 0, Errc::invalid, "epochs must be positive");
        require(batch >= 1, Errc::invalid, "batch must be at least 1");
        require(learning_rate >= 0.0f, Errc::invalid, "learning rate must be non-negative");
    }
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_accuracy = 0.0;
};

using TrainHistory = std::vector<EpochStats>;

/// Minibatch training of the patch CNN; deterministic per (data, config).
/// Records mean train loss and val accuracy per epoch.
TrainHistory train_cnn(CnnModel& model, const std::vector<Patch>& train,
                       const std::vector<Patch>& val, const TrainConfig& cfg);

/// Inference on one patch: argmax class (ties to the lowest id) plus the
/// full probability vector. The final softmax runs in double so the
/// probabilities sum to 1 within 1e-12.
std::pair<int, std::array<double, kClassCount>> predict_patch(const CnnModel& model, const Patch& patch);
std::pair<int, std::array<double, kClassCount>> predict_logits(const std::vector<float>& logits);

void save_history_csv(const TrainHistory& h, const std::string& path);

} // namespace lcz
