#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "lczmap/labelmap.hpp"

namespace lcz {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

/// Exactly one color per class id 0..13; no two entries may be identical.
struct Palette {
    std::array<Rgb, kClassCount> entries{};
    void validate() const;
};

/// Evenly spaced hues at full saturation/value, class k at k*360/14 degrees.
Palette default_palette();

/// CSV rows "class_id,R,G,B"; an optional header line is skipped. All 14
/// classes must be present exactly once.
Palette load_palette_csv(const std::string& path);

/// Writes an 8-bit RGB PNG (no alpha), one pixel per label cell.
void render_map(const LabelMap& map, const Palette& palette, const std::string& png_path);

} // namespace lcz
