#include <doctest.h>

#include <set>

#include "lczmap/error.hpp"
#include "lczmap/pipeline.hpp"
#include "lczmap/rng.hpp"
#include "lczmap/synth.hpp"

using namespace lcz;

namespace {

RasterStack random_scene(int w, int h, std::uint64_t seed) {
    RasterStack s(w, h, kPatchBands);
    Rng rng(seed);
    for (float& v : s.data) v = static_cast<float>(rng.next_unit());
    return s;
}

SynthSceneSpec noisy_two_class_spec() {
    SynthSceneSpec spec = builtin_scene_spec("texture2");
    spec.width = 160;
    spec.height = 160;
    spec.tile = 40;
    spec.noise_sigma = 0.12f;
    spec.classes[0].texture = TextureKind::flat;
    spec.classes[1].texture = TextureKind::flat;
    spec.classes[0].amp = 0.0f;
    spec.classes[1].amp = 0.0f;
    spec.classes[0].mean.fill(0.42f);
    spec.classes[1].mean.fill(0.58f);
    return spec;
}

Model trained_rf_on(const RasterStack& raster, const LabelMap& truth, int per_class,
                    std::uint64_t seed) {
    auto samples = sample_truth(truth, per_class, seed);
    DatasetSplit split = split_samples(samples, seed + 1);
    std::vector<PointSample> train_val = split.train;
    train_val.insert(train_val.end(), split.val.begin(), split.val.end());
    auto rows = patches_to_rows(extract_patches(raster, train_val));
    return Model{train_rf(rows, 16, seed + 2)};
}

} // namespace

TEST_CASE("classify_map_cnn matches predict_patch at interior pixels bit-for-bit") {
    CnnModel model = build_model<float>(3, 99);
    RasterStack scene = random_scene(64, 48, 5);
    LabelMap map = classify_map_cnn(model, scene, 1);
    CHECK(map.width == 64);
    CHECK(map.height == 48);

    Rng rng(17);
    for (int probe = 0; probe < 50; ++probe) {
        int r = kPatchRadius + static_cast<int>(rng.next_index(48 - 2 * kPatchRadius));
        int c = kPatchRadius + static_cast<int>(rng.next_index(64 - 2 * kPatchRadius));
        Patch p = extract_patch(scene, {r, c, 0});
        auto [cls, probs] = predict_patch(model, p);
        (void)probs;
        REQUIRE(map.at(r, c) == cls);
    }
}

TEST_CASE("full-map CNN inference hits border pixels through reflect padding") {
    CnnModel model = build_model<float>(3, 7);
    RasterStack scene = random_scene(40, 32, 9);
    LabelMap map = classify_map_cnn(model, scene, 1);

    // border pixel: rebuild its padded window by hand and classify it
    Rng rng(3);
    for (int probe = 0; probe < 20; ++probe) {
        int r = static_cast<int>(rng.next_index(32));
        int c = static_cast<int>(rng.next_index(40));
        Patch p;
        p.values = Tensor3(kPatchSide, kPatchSide, kPatchBands);
        for (int i = 0; i < kPatchSide; ++i)
            for (int j = 0; j < kPatchSide; ++j)
                for (int b = 0; b < kPatchBands; ++b)
                    p.values.at(i, j, b) = scene.at(mirror_index(r - kPatchRadius + i, 32),
                                                    mirror_index(c - kPatchRadius + j, 40), b);
        CHECK(map.at(r, c) == predict_patch(model, p).first);
    }
}

TEST_CASE("parallel and single-threaded maps are byte-identical") {
    CnnModel model = build_model<float>(3, 42);
    RasterStack scene = random_scene(96, 80, 21);
    LabelMap serial = classify_map_cnn(model, scene, 1);
    LabelMap parallel = classify_map_cnn(model, scene, 4);
    CHECK(serial.labels == parallel.labels);

    Model rf = Model{train_rf(patches_to_rows({extract_patch(scene, {5, 5, 0}),
                                               extract_patch(scene, {6, 6, 1})}),
                              4, 1)};
    LabelMap ps = classify_map_pixel(rf, scene, 1);
    LabelMap pp = classify_map_pixel(rf, scene, 4);
    CHECK(ps.labels == pp.labels);
}

TEST_CASE("constant rasters produce constant maps") {
    RasterStack flat(48, 40, kPatchBands);
    for (float& v : flat.data) v = 0.5f;

    CnnModel cnn = build_model<float>(3, 1);
    LabelMap m1 = classify_map_cnn(cnn, flat, 0);
    for (auto v : m1.labels) CHECK(v == m1.labels[0]);

    auto rows = patches_to_rows({extract_patch(flat, {5, 5, 0}), extract_patch(flat, {6, 6, 1})});
    Model rf = Model{train_rf(rows, 4, 1)};
    LabelMap m2 = classify_map_pixel(rf, flat, 0);
    for (auto v : m2.labels) CHECK(v == m2.labels[0]);
}

TEST_CASE("classify_map_pixel equals predict_pixel at sampled points") {
    auto spec = noisy_two_class_spec();
    auto [raster, truth] = synth_scene(spec, 31);
    Model rf = trained_rf_on(raster, truth, 40, 7);
    LabelMap map = classify_map_pixel(rf, raster, 0);

    Rng rng(5);
    const Forest& forest = std::get<Forest>(rf.impl);
    for (int probe = 0; probe < 100; ++probe) {
        int r = static_cast<int>(rng.next_index(raster.height));
        int c = static_cast<int>(rng.next_index(raster.width));
        std::array<float, kPatchBands> f{};
        for (int b = 0; b < kPatchBands; ++b) f[b] = raster.at(r, c, b);
        CHECK(map.at(r, c) == predict_pixel(forest, f));
    }
}

TEST_CASE("classification preconditions") {
    CnnModel model = build_model<float>(3, 1);
    RasterStack wrong_bands(32, 32, 4);
    CHECK_THROWS_AS(classify_map_cnn(model, wrong_bands, 1), Error);

    RasterStack unnormalized(32, 32, kPatchBands);
    for (float& v : unnormalized.data) v = 7.5f;
    CHECK_THROWS_AS(classify_map_cnn(model, unnormalized, 1), Error);
}

TEST_CASE("a spectrally bimodal scene yields exactly the two trained classes") {
    auto spec = noisy_two_class_spec();
    spec.noise_sigma = 0.05f;
    auto [raster, truth] = synth_scene(spec, 13);
    Model rf = trained_rf_on(raster, truth, 40, 3);
    LabelMap map = classify_map_pixel(rf, raster, 0);
    std::set<int> present(map.labels.begin(), map.labels.end());
    CHECK(present == std::set<int>{0, 1});
}

TEST_CASE("regularization never introduces an absent class") {
    auto spec = noisy_two_class_spec();
    auto [raster, truth] = synth_scene(spec, 17);
    Model rf = trained_rf_on(raster, truth, 30, 11);
    LabelMap raw = classify_map_pixel(rf, raster, 0);
    LabelMap mv = majority_vote(raw, 11);
    std::set<int> raw_classes(raw.labels.begin(), raw.labels.end());
    for (auto v : mv.labels) CHECK(raw_classes.count(v) == 1);
}

TEST_CASE("evaluate_protocol") {
    auto spec = noisy_two_class_spec();
    auto [raster, truth] = synth_scene(spec, 23);
    auto samples = sample_truth(truth, 60, 2);
    DatasetSplit split = split_samples(samples, 3);

    SUBCASE("baselines report raw and regularized blocks; MV helps on noise") {
        std::vector<PointSample> train_val = split.train;
        train_val.insert(train_val.end(), split.val.begin(), split.val.end());
        auto rows = patches_to_rows(extract_patches(raster, train_val));
        Model rf = Model{train_rf(rows, 16, 5)};

        EvalReport rep = evaluate_protocol(rf, raster, split);
        REQUIRE(rep.raw.has_value());
        CHECK(rep.final.oa >= rep.raw->oa); // iid noise errors get repaired
        CHECK(rep.final.oa > 0.9);          // easy scene after regularization
    }

    SUBCASE("CNN path predicts patches directly, no raw block") {
        CnnModel cnn = build_model<float>(3, 3);
        std::vector<Patch> train = augment(extract_patches(raster, split.train));
        TrainConfig cfg;
        cfg.epochs = 30;
        cfg.seed = 4;
        cfg.threads = 2;
        train_cnn(cnn, train, {}, cfg);
        EvalReport rep = evaluate_protocol(Model{cnn}, raster, split);
        CHECK(!rep.raw.has_value());
        CHECK(rep.final.oa > 0.9);
    }

    SUBCASE("patch-vote flag reads the window mode") {
        std::vector<PointSample> train_val = split.train;
        train_val.insert(train_val.end(), split.val.begin(), split.val.end());
        auto rows = patches_to_rows(extract_patches(raster, train_val));
        Model rf = Model{train_rf(rows, 8, 5)};
        EvalOptions opts;
        opts.patch_vote = true;
        EvalReport rep = evaluate_protocol(rf, raster, split, opts);
        CHECK(rep.final.oa > 0.8);
    }

    SUBCASE("empty test set is an error") {
        DatasetSplit empty;
        empty.train = split.train;
        Model rf = Model{train_rf(patches_to_rows(extract_patches(raster, split.train)), 4, 1)};
        CHECK_THROWS_AS(evaluate_protocol(rf, raster, empty), Error);
    }
}

TEST_CASE("thread resolution respects the environment cap") {
    CHECK(resolve_threads_inference(3) >= 1);
    CHECK(resolve_threads_training(0) >= 1);
    CHECK(resolve_threads_training(5) == 5);
}
