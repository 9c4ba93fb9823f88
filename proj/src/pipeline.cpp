#include "lczmap/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

#include "lczmap/error.hpp"

namespace lcz {

namespace {

int env_thread_cap() {
    const char* s = std::getenv("LCZPIPE_THREADS");
    if (!s || !*s) return 0;
    int v = std::atoi(s);
    return v > 0 ? v : 0;
}

void check_classifiable(const RasterStack& stack) {
    require(stack.bands == kPatchBands, Errc::invalid,
            "classification expects a " + std::to_string(kPatchBands) + "-band stack");
    for (float v : stack.data)
        require(v >= 0.0f && v <= 1.0f, Errc::invalid,
                "stack must be normalized to [0,1] before classification");
}

void run_striped(int height, int threads, const std::function<void(int, int)>& body) {
    // Fixed stripe geometry regardless of worker count, so serial and
    // parallel runs write identical bytes.
    constexpr int kStripe = 64;
    std::vector<std::pair<int, int>> stripes;
    for (int r0 = 0; r0 < height; r0 += kStripe)
        stripes.emplace_back(r0, std::min(height, r0 + kStripe));

    if (threads <= 1 || stripes.size() == 1) {
        for (auto [r0, r1] : stripes) body(r0, r1);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= stripes.size()) return;
            body(stripes[i].first, stripes[i].second);
        }
    };
    std::vector<std::thread> pool;
    int n = std::min<int>(threads, static_cast<int>(stripes.size()));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace

int resolve_threads_inference(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (int cap = env_thread_cap(); cap > 0) n = std::min(n, cap);
    return n;
}

int resolve_threads_training(int requested) {
    if (requested > 0) return requested;
    if (int cap = env_thread_cap(); cap > 0) return cap;
    return 1; // training is single-threaded unless explicitly raised
}

LabelMap classify_map_cnn(const CnnModel& model, const RasterStack& stack, int threads) {
    check_classifiable(stack);
    const int H = stack.height, W = stack.width;
    const int pad = kPatchRadius;
    const int k = model.k;
    const int pool_side = model.pool_side;
    LabelMap out(W, H);

    const int nthreads = resolve_threads_inference(threads);

    run_striped(H, nthreads, [&](int r0, int r1) {
        const int S = r1 - r0;
        // Reflect-padded sub-image covering every window of the stripe.
        Tensor3 padded(S + 2 * pad, W + 2 * pad, kPatchBands);
        for (int i = 0; i < padded.rows; ++i) {
            const int src_i = mirror_index(r0 + i - pad, H);
            for (int j = 0; j < padded.cols; ++j) {
                const int src_j = mirror_index(j - pad, W);
                for (int b = 0; b < kPatchBands; ++b)
                    padded.at(i, j, b) = stack.at(src_i, src_j, b);
            }
        }

        // Shared convolutions: each pixel's 11x11 window sees exactly the
        // sums conv_forward would produce on the extracted patch.
        Tensor3 a1 = relu(conv_forward(padded, model.conv1));
        Tensor3 a2 = relu(conv_forward(a1, model.conv2));
        Tensor3 mf = maxfilter3(a2);

        std::vector<float> flat(static_cast<std::size_t>(model.flat_size));
        for (int lr = 0; lr < S; ++lr) {
            for (int j = 0; j < W; ++j) {
                float* dst = flat.data();
                for (int u = 0; u < pool_side; ++u)
                    for (int v = 0; v < pool_side; ++v) {
                        const float* src = &mf.v[mf.index(lr + 2 * u, j + 2 * v, 0)];
                        for (int c = 0; c < kConv2Filters; ++c) *dst++ = src[c];
                    }
                std::vector<float> z3 = dense_forward(flat, model.fc1);
                for (float& v : z3) v = v > 0.0f ? v : 0.0f;
                std::vector<float> logits = dense_forward(z3, model.fc2);
                int best = 0;
                for (int c = 1; c < kClassCount; ++c)
                    if (logits[c] > logits[best]) best = c;
                out.at(r0 + lr, j) = static_cast<std::uint8_t>(best);
            }
        }
    });
    (void)k;
    return out;
}

namespace {

int predict_any_pixel(const Model& model, const std::array<float, kPatchBands>& features) {
    switch (model.kind()) {
        case ModelKind::ann: return predict_pixel(std::get<AnnModel>(model.impl), features);
        case ModelKind::rf: return predict_pixel(std::get<Forest>(model.impl), features);
        case ModelKind::svm: return predict_pixel(std::get<LinearSvmOvr>(model.impl), features);
        default: fail(Errc::invalid, "pixel classification needs a pixel-based model");
    }
}

} // namespace

LabelMap classify_map_pixel(const Model& model, const RasterStack& stack, int threads) {
    check_classifiable(stack);
    require(model.kind() != ModelKind::cnn, Errc::invalid,
            "pixel classification needs a pixel-based model");
    const int H = stack.height, W = stack.width;
    LabelMap out(W, H);
    const int nthreads = resolve_threads_inference(threads);

    run_striped(H, nthreads, [&](int r0, int r1) {
        std::array<float, kPatchBands> features{};
        for (int i = r0; i < r1; ++i)
            for (int j = 0; j < W; ++j) {
                for (int b = 0; b < kPatchBands; ++b) features[b] = stack.at(i, j, b);
                out.at(i, j) = static_cast<std::uint8_t>(predict_any_pixel(model, features));
            }
    });
    return out;
}

LabelMap classify_map(const Model& model, const RasterStack& stack, int threads) {
    if (model.kind() == ModelKind::cnn)
        return classify_map_cnn(std::get<CnnModel>(model.impl), stack, threads);
    return classify_map_pixel(model, stack, threads);
}

namespace {

std::uint8_t read_map_at(const LabelMap& map, const PointSample& s, bool patch_vote) {
    if (!patch_vote) return map.at(s.row, s.col);
    std::array<int, kClassCount> hist{};
    for (int di = -kPatchRadius; di <= kPatchRadius; ++di)
        for (int dj = -kPatchRadius; dj <= kPatchRadius; ++dj)
            ++hist[map.at(s.row + di, s.col + dj)];
    int best = 0;
    for (int k = 1; k < kClassCount; ++k)
        if (hist[k] > hist[best]) best = k;
    return static_cast<std::uint8_t>(best);
}

} // namespace

EvalReport evaluate_protocol(const Model& model, const RasterStack& stack,
                             const DatasetSplit& split, const EvalOptions& opts) {
    require(!split.test.empty(), Errc::invalid, "test set is empty");
    for (const PointSample& s : split.test) validate_sample(s, stack.width, stack.height);

    std::vector<std::uint8_t> truth;
    truth.reserve(split.test.size());
    for (const PointSample& s : split.test) truth.push_back(static_cast<std::uint8_t>(s.class_id));

    EvalReport report;
    if (model.kind() == ModelKind::cnn) {
        const CnnModel& cnn = std::get<CnnModel>(model.impl);
        std::vector<std::uint8_t> pred(split.test.size());
        for (std::size_t i = 0; i < split.test.size(); ++i) {
            Patch p = extract_patch(stack, split.test[i]);
            pred[i] = static_cast<std::uint8_t>(predict_patch(cnn, p).first);
        }
        report.final = make_report(confusion(pred, truth));
        return report;
    }

    LabelMap raw_map = classify_map_pixel(model, stack, opts.threads);
    LabelMap mv_map = majority_vote(raw_map, opts.mv_kernel);

    std::vector<std::uint8_t> pred_raw(split.test.size()), pred_mv(split.test.size());
    for (std::size_t i = 0; i < split.test.size(); ++i) {
        pred_raw[i] = read_map_at(raw_map, split.test[i], opts.patch_vote);
        pred_mv[i] = read_map_at(mv_map, split.test[i], opts.patch_vote);
    }
    report.final = make_report(confusion(pred_mv, truth));
    report.raw = make_report(confusion(pred_raw, truth));
    return report;
}

} // namespace lcz
