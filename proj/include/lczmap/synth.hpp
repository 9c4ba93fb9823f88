#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lczmap/labelmap.hpp"
#include "lczmap/raster.hpp"
#include "lczmap/sampling.hpp"

namespace lcz {

/// Spatial modulation applied on top of a class's spectral mean. checker,
/// stripes and speckle all add +-amp with a 50/50 marginal, so classes that
/// share a mean and an amplitude are spectrally indistinguishable per pixel
/// and differ only in spatial arrangement.
enum class TextureKind { flat = 0, checker = 1, stripes = 2, speckle = 3 };

struct ClassSpec {
    std::array<float, kPatchBands> mean{}; // per-band reflectance-like means in [0,1]
    TextureKind texture = TextureKind::flat;
    float amp = 0.0f;
};

/// Recipe for a deterministic test scene: rectangular class regions of at
/// least tile x tile pixels, per-class spectral mean + texture modulation +
/// white Gaussian noise.
struct SynthSceneSpec {
    int width = 512;
    int height = 512;
    int tile = 64; // region edge length; >= 30
    float noise_sigma = 0.05f;
    std::uint64_t layout_seed = 1;
    int classes_used = kClassCount; // regions are drawn from classes [0, classes_used)
    std::array<ClassSpec, kClassCount> classes{};

    void validate() const;
};

/// Built-in recipes:
///  - "lcz14": all 14 classes; four pairs share spectral means and differ
///    only in texture, one pair of classes sits spectrally close, the rest
///    are well separated.
///  - "texture2": two classes with identical means, checker vs stripes.
SynthSceneSpec builtin_scene_spec(const std::string& name);

/// key=value text file; see README for the key set.
SynthSceneSpec load_scene_spec(const std::string& path);
void save_scene_spec(const SynthSceneSpec& spec, const std::string& path);

/// Deterministic in (spec, seed): the same inputs reproduce both outputs
/// byte for byte. Values are clamped to [0,1], so the stack is usable
/// without a separate normalize step.
std::pair<RasterStack, LabelMap> synth_scene(const SynthSceneSpec& spec, std::uint64_t seed);

/// Draws `per_class` distinct in-margin positions for every class present
/// in the truth map. Fails if a present class has too few eligible pixels.
std::vector<PointSample> sample_truth(const LabelMap& truth, int per_class, std::uint64_t seed);

} // namespace lcz
