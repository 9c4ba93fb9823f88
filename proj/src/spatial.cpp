#include "lczmap/spatial.hpp"

#include <array>

#include "lczmap/error.hpp"
#include "lczmap/raster.hpp"

namespace lcz {

namespace {

inline int mode_of(const std::array<int, kClassCount>& hist) {
    int best = 0;
    for (int k = 1; k < kClassCount; ++k)
        if (hist[k] > hist[best]) best = k;
    return best;
}

} // namespace

LabelMap majority_vote(const LabelMap& map, int kernel) {
    map.validate();
    require(kernel >= 1 && kernel % 2 == 1, Errc::invalid, "majority-vote kernel must be odd");
    if (kernel == 1) return map;

    const int r = kernel / 2;
    const int w = map.width, h = map.height;
    LabelMap out(w, h);

    // Row-incremental sliding histogram: step right by removing the column
    // that left the window and adding the one that entered, both through the
    // mirrored border index.
    std::array<int, kClassCount> hist{};
    for (int i = 0; i < h; ++i) {
        hist.fill(0);
        for (int di = -r; di <= r; ++di) {
            const int mi = mirror_index(i + di, h);
            for (int dj = -r; dj <= r; ++dj) ++hist[map.at(mi, mirror_index(dj, w))];
        }
        out.at(i, 0) = static_cast<std::uint8_t>(mode_of(hist));
        for (int j = 1; j < w; ++j) {
            const int out_col = mirror_index(j - 1 - r, w);
            const int in_col = mirror_index(j + r, w);
            for (int di = -r; di <= r; ++di) {
                const int mi = mirror_index(i + di, h);
                --hist[map.at(mi, out_col)];
                ++hist[map.at(mi, in_col)];
            }
            out.at(i, j) = static_cast<std::uint8_t>(mode_of(hist));
        }
    }
    return out;
}

LabelMap aggregate_to_lcz(const LabelMap& map, int block) {
    map.validate();
    require(block >= 1, Errc::invalid, "block size must be positive");
    require(map.width >= block && map.height >= block, Errc::invalid,
            "map smaller than the aggregation block");

    const int ow = (map.width + block - 1) / block;
    const int oh = (map.height + block - 1) / block;
    LabelMap out(ow, oh);
    for (int bi = 0; bi < oh; ++bi)
        for (int bj = 0; bj < ow; ++bj) {
            std::array<int, kClassCount> hist{};
            const int i1 = std::min(map.height, (bi + 1) * block);
            const int j1 = std::min(map.width, (bj + 1) * block);
            for (int i = bi * block; i < i1; ++i)
                for (int j = bj * block; j < j1; ++j) ++hist[map.at(i, j)];
            out.at(bi, bj) = static_cast<std::uint8_t>(mode_of(hist));
        }
    return out;
}

} // namespace lcz
