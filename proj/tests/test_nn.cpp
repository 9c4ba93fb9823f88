#include <doctest.h>

#include <cmath>
#include <cstring>

#include "lczmap/error.hpp"
#include "lczmap/nn.hpp"
#include "lczmap/rng.hpp"

using namespace lcz;

namespace {

template <class T>
Tensor3T<T> random_tensor(int r, int c, int ch, std::uint64_t seed) {
    Tensor3T<T> t(r, c, ch);
    Rng rng(seed);
    for (T& v : t.v) v = static_cast<T>(rng.next_unit());
    return t;
}

Patch make_patch(std::uint64_t seed, int label, float offset = 0.0f) {
    Patch p;
    p.values = Tensor3(kPatchSide, kPatchSide, kPatchBands);
    Rng rng(seed);
    for (float& v : p.values.v) v = static_cast<float>(0.25 * rng.next_unit()) + offset;
    p.label = label;
    return p;
}

} // namespace

TEST_CASE("conv_forward shapes and arithmetic") {
    SUBCASE("11x11x10 with 32 3x3 filters gives 9x9x32") {
        auto x = random_tensor<float>(11, 11, 10, 1);
        ConvLayerT<float> L;
        L.resize(3, 10, 32);
        Tensor3 out = conv_forward(x, L);
        CHECK(out.rows == 9);
        CHECK(out.cols == 9);
        CHECK(out.channels == 32);
    }

    SUBCASE("zero kernel with bias beta yields constant beta") {
        auto x = random_tensor<float>(7, 7, 4, 2);
        ConvLayerT<float> L;
        L.resize(3, 4, 5);
        for (int f = 0; f < 5; ++f) L.b[f] = 0.5f + f;
        Tensor3 out = conv_forward(x, L);
        for (int i = 0; i < out.rows; ++i)
            for (int j = 0; j < out.cols; ++j)
                for (int f = 0; f < 5; ++f) CHECK(out.at(i, j, f) == 0.5f + f);
    }

    SUBCASE("3x3 single-channel filter reduces to a dot product") {
        Tensor3 x(3, 3, 1);
        ConvLayerT<float> L;
        L.resize(3, 1, 1);
        float want = 0.0f;
        for (int i = 0; i < 9; ++i) {
            x.v[i] = static_cast<float>(i + 1);
            L.w[i] = 0.5f * static_cast<float>(9 - i);
            want += x.v[i] * L.w[i];
        }
        L.b[0] = 0.25f;
        Tensor3 out = conv_forward(x, L);
        REQUIRE(out.size() == 1);
        CHECK(out.v[0] == doctest::Approx(want + 0.25f));
    }

    SUBCASE("channel mismatch and undersized input throw") {
        auto x = random_tensor<float>(5, 5, 3, 3);
        ConvLayerT<float> L;
        L.resize(3, 4, 2);
        CHECK_THROWS_AS(conv_forward(x, L), Error);
        ConvLayerT<float> L2;
        L2.resize(7, 3, 2);
        CHECK_THROWS_AS(conv_forward(x, L2), Error);
    }
}

TEST_CASE("relu clamps negatives elementwise") {
    Tensor3 x(1, 3, 1);
    x.v = {-1.0f, 0.0f, 2.0f};
    Tensor3 y = relu(x);
    CHECK(y.v[0] == 0.0f);
    CHECK(y.v[1] == 0.0f);
    CHECK(y.v[2] == 2.0f);

    Tensor3 neg(2, 2, 2);
    for (float& v : neg.v) v = -3.5f;
    for (float v : relu(neg).v) CHECK(v == 0.0f);

    Tensor3 pos(2, 2, 2);
    for (float& v : pos.v) v = 1.25f;
    CHECK(relu(pos).v == pos.v);
}

TEST_CASE("maxpool 3x3 stride 2") {
    SUBCASE("7x7x64 pools to 3x3x64") {
        auto x = random_tensor<float>(7, 7, 64, 4);
        Tensor3 out = maxpool_forward(x, nullptr);
        CHECK(out.rows == 3);
        CHECK(out.cols == 3);
        CHECK(out.channels == 64);
    }

    SUBCASE("constant input pools to the constant") {
        Tensor3 x(7, 7, 2);
        for (float& v : x.v) v = 0.7f;
        for (float v : maxpool_forward(x, nullptr).v) CHECK(v == 0.7f);
    }

    SUBCASE("ramp x[i,j] = 7i + j picks each window's bottom-right corner") {
        Tensor3 x(7, 7, 1);
        for (int i = 0; i < 7; ++i)
            for (int j = 0; j < 7; ++j) x.at(i, j, 0) = static_cast<float>(7 * i + j);
        Tensor3 out = maxpool_forward(x, nullptr);
        for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v)
                CHECK(out.at(u, v, 0) == static_cast<float>(7 * (2 * u + 2) + (2 * v + 2)));
    }

    SUBCASE("argmax routes gradients to the max position") {
        Tensor3 x(3, 3, 1);
        x.v = {0, 0, 0, 0, 5, 0, 0, 0, 0};
        std::vector<std::int32_t> argmax;
        Tensor3 out = maxpool_forward(x, &argmax);
        REQUIRE(out.size() == 1);
        CHECK(out.v[0] == 5.0f);
        Tensor3 dout(1, 1, 1);
        dout.v[0] = 2.0f;
        Tensor3 dx(3, 3, 1);
        maxpool_backward(dout, argmax, dx);
        CHECK(dx.at(1, 1, 0) == 2.0f);
        float total = 0;
        for (float v : dx.v) total += v;
        CHECK(total == 2.0f);
    }

    SUBCASE("input below the window size throws") {
        auto x = random_tensor<float>(2, 7, 1, 5);
        CHECK_THROWS_AS(maxpool_forward(x, nullptr), Error);
    }
}

TEST_CASE("dense_forward") {
    SUBCASE("hand example W=[[1,2]], b=[3], v=[4,5]") {
        DenseLayerT<float> L;
        L.resize(1, 2);
        L.w = {1.0f, 2.0f};
        L.b = {3.0f};
        auto out = dense_forward<float>({4.0f, 5.0f}, L);
        REQUIRE(out.size() == 1);
        CHECK(out[0] == 17.0f);
    }

    SUBCASE("identity weights with zero bias pass through") {
        DenseLayerT<float> L;
        L.resize(4, 4);
        for (int i = 0; i < 4; ++i) L.w[i * 4 + i] = 1.0f;
        std::vector<float> v = {1, 2, 3, 4};
        CHECK(dense_forward(v, L) == v);
    }

    SUBCASE("dimension mismatch throws") {
        DenseLayerT<float> L;
        L.resize(2, 3);
        std::vector<float> v = {1, 2};
        CHECK_THROWS_AS(dense_forward(v, L), Error);
    }
}

TEST_CASE("softmax") {
    SUBCASE("equal logits are uniform") {
        std::vector<double> l(14, 3.0);
        auto p = softmax(l);
        for (double v : p) CHECK(v == doctest::Approx(1.0 / 14).epsilon(1e-12));
        double sum = 0;
        for (double v : p) sum += v;
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }

    SUBCASE("constant shifts change nothing") {
        std::vector<double> a = {0.3, -1.2, 2.5, 0.0};
        std::vector<double> b = a;
        for (double& v : b) v += 7.25;
        auto pa = softmax(a);
        auto pb = softmax(b);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(pa[i] == doctest::Approx(pb[i]).epsilon(1e-12));
    }

    SUBCASE("logits [0, ln 3] give [0.25, 0.75]") {
        auto p = softmax<double>({0.0, std::log(3.0)});
        CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(0.75).epsilon(1e-12));
    }

    SUBCASE("huge logits do not overflow") {
        auto p = softmax<float>({5000.0f, 4999.0f});
        CHECK(std::isfinite(p[0]));
        CHECK(p[0] > p[1]);
    }
}

TEST_CASE("dropout semantics") {
    SUBCASE("rate 0 is the identity in both modes") {
        std::vector<float> v = {1, 2, 3};
        Rng rng(1);
        auto w = v;
        dropout_forward(w, 0.0, true, &rng, nullptr);
        CHECK(w == v);
        dropout_forward(w, 0.0, false, nullptr, nullptr);
        CHECK(w == v);
    }

    SUBCASE("inference mode is the identity at any rate") {
        std::vector<float> v(100, 2.0f);
        auto w = v;
        dropout_forward(w, 0.5, false, nullptr, nullptr);
        CHECK(w == v);
    }

    SUBCASE("train mode at rate 0.5 keeps about half, scaled by 2") {
        const std::size_t n = 100000;
        std::vector<float> v(n, 1.0f);
        Rng rng(42);
        std::vector<std::uint8_t> mask;
        dropout_forward(v, 0.5, true, &rng, &mask);
        std::size_t survivors = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask[i]) {
                ++survivors;
                CHECK(v[i] == 2.0f);
            } else {
                CHECK(v[i] == 0.0f);
            }
        }
        double frac = static_cast<double>(survivors) / n;
        CHECK(frac > 0.49);
        CHECK(frac < 0.51);
    }
}

TEST_CASE("build_model shape chains") {
    SUBCASE("k=3 follows the canonical chain") {
        auto m = build_model<float>(3, 0);
        CHECK(m.conv1_side == 9);
        CHECK(m.conv2_side == 7);
        CHECK(m.pool_side == 3);
        CHECK(m.flat_size == 576);
        CHECK(m.conv1.out_ch == 32);
        CHECK(m.conv2.out_ch == 64);
        CHECK(m.fc1.out == 128);
        CHECK(m.fc2.out == 14);
    }

    SUBCASE("k=5: 7x7x32, 3x3x64, pool 1x1x64, flatten 64") {
        auto m = build_model<float>(5, 0);
        CHECK(m.conv1_side == 7);
        CHECK(m.conv2_side == 3);
        CHECK(m.pool_side == 1);
        CHECK(m.flat_size == 64);
    }

    SUBCASE("k=1: 11x11, 11x11, pool 5x5x64, flatten 1600") {
        auto m = build_model<float>(1, 0);
        CHECK(m.conv1_side == 11);
        CHECK(m.conv2_side == 11);
        CHECK(m.pool_side == 5);
        CHECK(m.flat_size == 1600);
    }

    SUBCASE("other kernel sizes are rejected") {
        CHECK_THROWS_AS(build_model<float>(2, 0), Error);
        CHECK_THROWS_AS(build_model<float>(7, 0), Error);
    }
}

TEST_CASE("forward dims check and probability contract") {
    auto m = build_model<float>(3, 11);
    Patch p = make_patch(1, 5);
    auto [cls, probs] = predict_patch(m, p);
    CHECK(cls >= 0);
    CHECK(cls < 14);
    double sum = 0;
    for (double v : probs) {
        CHECK(v >= 0.0);
        sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);

    SUBCASE("wrong dims are rejected") {
        Patch bad;
        bad.values = Tensor3(9, 9, 10);
        CHECK_THROWS_AS(predict_patch(m, bad), Error);
    }

    SUBCASE("all-zero weights give uniform probabilities and class 0") {
        CnnModel z = build_model<float>(3, 0);
        for (auto* t : model_params(z)) std::fill(t->begin(), t->end(), 0.0f);
        auto [c, pr] = predict_patch(z, p);
        CHECK(c == 0);
        for (double v : pr) CHECK(v == doctest::Approx(1.0 / 14).epsilon(1e-12));
    }
}

TEST_CASE("softmax+cross-entropy output gradient is p - onehot") {
    auto m = build_model<float>(3, 21);
    Patch p = make_patch(9, 4);
    CnnGradients<float> g = CnnGradients<float>::like(m);
    g.zero();
    CnnWork<float> w;
    cnn_sample_backprop(m, p.values, p.label, false, nullptr, w, g);
    // dL/db of the output layer IS the logit gradient
    for (int c = 0; c < 14; ++c) {
        float want = w.probs[c] - (c == p.label ? 1.0f : 0.0f);
        CHECK(g.fc2.b[c] == doctest::Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("an exactly-confident correct prediction has ~zero loss and gradient") {
    auto m = build_model<float>(3, 2);
    for (auto* t : model_params(m)) std::fill(t->begin(), t->end(), 0.0f);
    m.fc2.b[6] = 60.0f; // forces prob ~1 for class 6
    Patch p = make_patch(3, 6);
    CnnGradients<float> g = CnnGradients<float>::like(m);
    g.zero();
    CnnWork<float> w;
    float loss = cnn_sample_backprop(m, p.values, p.label, false, nullptr, w, g);
    CHECK(loss < 1e-6f);
    for (float v : g.fc2.b) CHECK(std::abs(v) < 1e-6f);
}

TEST_CASE("analytic gradients match central finite differences") {
    // 64-bit model, dropout off, epsilon 1e-4, as the contract states.
    auto m = build_model<double>(3, 1234);
    std::vector<Tensor3T<double>> xs;
    std::vector<int> labels;
    Rng prng(55);
    for (int s = 0; s < 2; ++s) {
        Tensor3T<double> x(kPatchSide, kPatchSide, kPatchBands);
        for (double& v : x.v) v = prng.next_unit();
        xs.push_back(std::move(x));
        labels.push_back(static_cast<int>(prng.next_index(14)));
    }

    CnnGradients<double> g = CnnGradients<double>::like(m);
    cnn_batch_backprop(m, xs, labels, g);

    auto params = model_params(m);
    auto grads = g.params();
    const double eps = 1e-4;
    Rng pick(99);
    double max_rel = 0.0;
    for (int probe = 0; probe < 200; ++probe) {
        std::size_t ti = pick.next_index(params.size());
        std::size_t pi = pick.next_index(params[ti]->size());
        double saved = (*params[ti])[pi];
        (*params[ti])[pi] = saved + eps;
        double lp = cnn_batch_loss(m, xs, labels);
        (*params[ti])[pi] = saved - eps;
        double lm = cnn_batch_loss(m, xs, labels);
        (*params[ti])[pi] = saved;
        double numeric = (lp - lm) / (2 * eps);
        double analytic = (*grads[ti])[pi];
        double rel = std::abs(analytic - numeric) / std::max(std::abs(analytic) + std::abs(numeric), 1e-6);
        max_rel = std::max(max_rel, rel);
    }
    CHECK(max_rel < 1e-5);
}

TEST_CASE("train_cnn basics") {
    std::vector<Patch> train, val;
    // two spectrally separated classes
    for (int i = 0; i < 24; ++i) {
        train.push_back(make_patch(100 + i, i % 2, i % 2 ? 0.5f : 0.0f));
        val.push_back(make_patch(400 + i, i % 2, i % 2 ? 0.5f : 0.0f));
    }

    SUBCASE("learning rate 0 leaves the weights untouched") {
        CnnModel m = build_model<float>(3, 5);
        CnnModel before = m;
        TrainConfig cfg;
        cfg.epochs = 2;
        cfg.learning_rate = 0.0f;
        cfg.seed = 1;
        train_cnn(m, train, val, cfg);
        for (std::size_t i = 0; i < m.conv1.w.size(); ++i) CHECK(m.conv1.w[i] == before.conv1.w[i]);
        CHECK(m.fc2.b == before.fc2.b);
    }

    SUBCASE("same seed twice gives identical weights; threads do not matter") {
        TrainConfig cfg;
        cfg.epochs = 3;
        cfg.seed = 17;
        CnnModel a = build_model<float>(3, 5);
        CnnModel b = build_model<float>(3, 5);
        train_cnn(a, train, val, cfg);
        train_cnn(b, train, val, cfg);
        CHECK(std::memcmp(a.fc1.w.data(), b.fc1.w.data(), a.fc1.w.size() * 4) == 0);
        CHECK(std::memcmp(a.conv2.w.data(), b.conv2.w.data(), a.conv2.w.size() * 4) == 0);

        CnnModel c = build_model<float>(3, 5);
        TrainConfig cfg4 = cfg;
        cfg4.threads = 4;
        train_cnn(c, train, val, cfg4);
        CHECK(std::memcmp(a.fc1.w.data(), c.fc1.w.data(), a.fc1.w.size() * 4) == 0);
        CHECK(std::memcmp(a.conv1.w.data(), c.conv1.w.data(), a.conv1.w.size() * 4) == 0);
        CHECK(std::memcmp(a.fc2.w.data(), c.fc2.w.data(), a.fc2.w.size() * 4) == 0);
    }

    SUBCASE("separable classes reach high val accuracy quickly") {
        CnnModel m = build_model<float>(3, 5);
        TrainConfig cfg;
        cfg.epochs = 12;
        cfg.seed = 3;
        TrainHistory h = train_cnn(m, train, val, cfg);
        REQUIRE(h.size() == 12);
        CHECK(h.back().val_accuracy >= 0.95);
        CHECK(h.back().train_loss < h.front().train_loss);
    }

    SUBCASE("empty training set is an error") {
        CnnModel m = build_model<float>(3, 5);
        TrainConfig cfg;
        CHECK_THROWS_AS(train_cnn(m, {}, val, cfg), Error);
    }
}
