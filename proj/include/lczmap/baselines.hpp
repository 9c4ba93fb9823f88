#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lczmap/nn.hpp"
#include "lczmap/sampling.hpp"

namespace lcz {

/// One pixel's spectrum with the label inherited from its patch.
struct PixelRow {
    std::array<float, kPatchBands> features{};
    int label = 0;
};

/// Every spatial cell of the patch becomes an independent 1x10 row sharing
/// the patch label: 121 rows per patch.
std::vector<PixelRow> patch_to_rows(const Patch& patch);
std::vector<PixelRow> patches_to_rows(const std::vector<Patch>& patches);

// ---------------------------------------------------------------------------
// ANN: 10 -> 20 -> 20 -> 14, ReLU hidden activations, softmax output,
// dropout 0.5 on both hidden layers during training.

struct AnnModel {
    DenseLayerT<float> fc1; // 20 x 10
    DenseLayerT<float> fc2; // 20 x 20
    DenseLayerT<float> fc3; // 14 x 20
};

AnnModel build_ann(std::uint64_t seed);
TrainHistory train_ann(AnnModel& model, const std::vector<PixelRow>& train,
                       const std::vector<PixelRow>& val, const TrainConfig& cfg);
std::vector<float> ann_logits(const AnnModel& model, const std::array<float, kPatchBands>& features);

// ---------------------------------------------------------------------------
// Random forest: bootstrap resamples, Gini splits over ceil(sqrt(10)) = 4
// features per node, grown to purity (min leaf 1), majority vote.

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    float threshold = 0.0f;
    std::int32_t left = -1, right = -1;
    std::array<std::uint32_t, kClassCount> counts{}; // leaf class histogram
};

struct Tree {
    std::vector<TreeNode> nodes;
    int predict(const std::array<float, kPatchBands>& features) const;
};

struct Forest {
    std::vector<Tree> trees;
};

constexpr int kForestDefaultTrees = 32;
constexpr int kForestFeaturesPerSplit = 4; // ceil(sqrt(10))

Forest train_rf(const std::vector<PixelRow>& rows, int tree_count, std::uint64_t seed,
                int threads = 1);

// ---------------------------------------------------------------------------
// Linear one-vs-rest SVM: hinge loss with L2 regularization, trained by
// Pegasos-style subgradient descent; prediction is the argmax score.

struct LinearSvmOvr {
    std::array<std::array<float, kPatchBands>, kClassCount> w{};
    std::array<float, kClassCount> b{};
};

struct SvmConfig {
    int epochs = 20;
    double lambda = 1e-4;
    std::uint64_t seed = 0;
};

LinearSvmOvr train_svm(const std::vector<PixelRow>& rows, const SvmConfig& cfg);

// ---------------------------------------------------------------------------
// Shared pixel-level prediction; ties always resolve to the lowest class id.

int predict_pixel(const AnnModel& model, const std::array<float, kPatchBands>& features);
int predict_pixel(const Forest& forest, const std::array<float, kPatchBands>& features);
int predict_pixel(const LinearSvmOvr& svm, const std::array<float, kPatchBands>& features);

} // namespace lcz
