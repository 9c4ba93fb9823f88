#pragma once

#include "lczmap/labelmap.hpp"

namespace lcz {

/// Sliding-kernel mode filter: every output pixel becomes the most frequent
/// class of the kernel x kernel neighborhood of the INPUT map (no in-place
/// cascading). Borders are reflect-padded; ties go to the lowest class id.
LabelMap majority_vote(const LabelMap& map, int kernel = 11);

/// Block-majority downsampling to a coarser grid: output dims are
/// ceil(dims/block); partial edge blocks use the pixels they have.
LabelMap aggregate_to_lcz(const LabelMap& map, int block = 10);

} // namespace lcz
