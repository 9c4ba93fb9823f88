#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lcz {

constexpr int kClassCount = 14;

/// Grid of class ids 0..13; the output of every classifier and the input to
/// the spatial-regularization ops.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> labels; // row-major

    LabelMap() = default;
    LabelMap(int w, int h);

    std::uint8_t at(int row, int col) const { return labels[static_cast<std::size_t>(row) * width + col]; }
    std::uint8_t& at(int row, int col) { return labels[static_cast<std::size_t>(row) * width + col]; }

    void validate() const; // dims positive, every label < kClassCount
};

/// Stored as a single-band uint8 raster in the same header+payload format
/// as RasterStack (dtype=uint8).
LabelMap load_labelmap(const std::string& header_path);
void save_labelmap(const LabelMap& map, const std::string& header_path);

} // namespace lcz
