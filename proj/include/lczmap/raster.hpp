#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lcz {

/// Multiband image grid, 32-bit floats, band-sequential storage: the full
/// grid of band 0, then band 1, and so on; row-major within each band.
struct RasterStack {
    int width = 0;
    int height = 0;
    int bands = 0;
    float resolution_m = 0.0f; // informational only
    std::vector<float> data;   // width*height*bands values

    RasterStack() = default;
    RasterStack(int w, int h, int b, float res_m = 0.0f);

    std::size_t band_pixels() const { return static_cast<std::size_t>(width) * height; }
    std::size_t size() const { return band_pixels() * static_cast<std::size_t>(bands); }

    float at(int row, int col, int band) const {
        return data[static_cast<std::size_t>(band) * band_pixels() + static_cast<std::size_t>(row) * width + col];
    }
    float& at(int row, int col, int band) {
        return data[static_cast<std::size_t>(band) * band_pixels() + static_cast<std::size_t>(row) * width + col];
    }

    /// Throws if dims are non-positive, the buffer length disagrees with the
    /// dims, or any value is non-finite.
    void validate() const;
};

/// Expected payload size in bytes for a float32 raster of the given dims.
std::uint64_t raster_payload_bytes(int width, int height, int bands);

/// Reads a key=value text header plus its raw little-endian float32 payload.
RasterStack load_raster(const std::string& header_path);

/// Writes header + payload such that load_raster() restores the stack
/// bit-exactly. The payload lands next to the header, extension ".bin".
void save_raster(const RasterStack& stack, const std::string& header_path);

/// Divides every value by the single global maximum over all bands.
/// Fails on an all-zero stack or on negative input values.
RasterStack normalize(const RasterStack& stack);

/// High-pass-filter pansharpening. `fine` is a 4-band stack at the target
/// resolution, `coarse` a 6-band stack at exactly half the grid size. Each
/// coarse band is bilinearly upsampled and sharpened by injecting
/// P - boxblur3(P), where P is the per-pixel mean of the fine bands.
/// Output is clamped to be non-negative.
RasterStack pansharpen(const RasterStack& fine, const RasterStack& coarse);

/// Mirror an index into [0, n) by reflecting about the edges without
/// repeating the edge sample (…2 1 0 | 0' is not produced; -1 maps to 1).
inline int mirror_index(int i, int n) {
    if (n == 1) return 0;
    int period = 2 * (n - 1);
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - m;
}

} // namespace lcz
