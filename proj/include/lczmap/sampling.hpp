#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lczmap/raster.hpp"
#include "lczmap/tensor.hpp"

namespace lcz {

constexpr int kPatchSide = 11;
constexpr int kPatchRadius = 5;
constexpr int kPatchBands = 10;

/// One labeled pixel location. The patch around it must fit inside the
/// raster, so row/col are constrained to the 5-pixel interior margin.
struct PointSample {
    int row = 0;
    int col = 0;
    int class_id = 0;
};

/// 11x11x10 sub-volume labeled by the class of its central pixel.
struct Patch {
    Tensor3 values; // kPatchSide x kPatchSide x kPatchBands
    int label = 0;
    int row = 0, col = 0; // center position in the source raster
};

enum class SplitSet { train = 0, val = 1, test = 2 };

/// Stratified 5:2:3 split of point samples, disjoint by origin.
struct DatasetSplit {
    std::vector<PointSample> train, val, test;
    std::uint64_t seed = 0;
};

/// CSV "row,col,class_id" with a one-line header. Every sample is checked
/// against the raster dims with the patch margin.
std::vector<PointSample> load_samples(const std::string& path, int raster_width, int raster_height);
void save_samples(const std::vector<PointSample>& samples, const std::string& path);

void validate_sample(const PointSample& s, int raster_width, int raster_height);

/// Per class: shuffle with the seed, cut at round(n*0.5) and round(n*0.7).
/// Classes are processed in ascending id order, samples in input order,
/// so the result is a pure function of (samples, seed).
DatasetSplit split_samples(const std::vector<PointSample>& samples, std::uint64_t seed);

/// Split manifest CSV "row,col,class_id,set" with set in {train,val,test}.
void save_split_csv(const DatasetSplit& split, const std::string& path);
DatasetSplit load_split_csv(const std::string& path, int raster_width, int raster_height);

Patch extract_patch(const RasterStack& stack, const PointSample& sample);
std::vector<Patch> extract_patches(const RasterStack& stack, const std::vector<PointSample>& samples);

/// Counter-clockwise quarter turn of the spatial plane of every band.
Patch rot90(const Patch& p);

/// originals plus their three quarter-turn rotations; exactly 4N patches,
/// labels and origins preserved.
std::vector<Patch> augment(const std::vector<Patch>& patches);

/// Binary patch-set files: magic + dims + per-patch label/origin/values.
void save_patches(const std::vector<Patch>& patches, const std::string& path);
std::vector<Patch> load_patches(const std::string& path);

} // namespace lcz
