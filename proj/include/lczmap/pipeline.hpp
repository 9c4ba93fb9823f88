#pragma once

#include "lczmap/labelmap.hpp"
#include "lczmap/metrics.hpp"
#include "lczmap/model.hpp"
#include "lczmap/raster.hpp"
#include "lczmap/sampling.hpp"
#include "lczmap/spatial.hpp"

namespace lcz {

/// Worker-count resolution. 0 means "decide": inference defaults to the
/// hardware concurrency, training to a single thread. The LCZPIPE_THREADS
/// environment variable caps (or, for training, enables) parallelism.
/// Results never depend on the worker count.
int resolve_threads_inference(int requested);
int resolve_threads_training(int requested);

/// Stride-1 sliding-window classification of every pixel: the stack is
/// reflect-padded by 5 so each pixel is labeled from its own 11x11x10
/// window, and output dims equal input dims. Internally the convolutions
/// run once over the padded image; per-pixel results are bit-identical to
/// predict_patch on the corresponding extracted patch.
LabelMap classify_map_cnn(const CnnModel& model, const RasterStack& stack, int threads = 0);

/// Per-pixel spectral classification with no spatial context.
LabelMap classify_map_pixel(const Model& model, const RasterStack& stack, int threads = 0);

/// Dispatch on the model kind.
LabelMap classify_map(const Model& model, const RasterStack& stack, int threads = 0);

struct EvalOptions {
    int mv_kernel = 11;
    bool patch_vote = false; // read the modal class of the 11x11 window instead of the center pixel
    int threads = 0;
};

/// The evaluation protocol: the CNN predicts each test patch directly; the
/// pixel baselines produce a full map, get majority-vote regularization,
/// and are read at the test samples' center pixels. Baseline reports carry
/// the pre-regularization metrics as a secondary block.
EvalReport evaluate_protocol(const Model& model, const RasterStack& stack,
                             const DatasetSplit& split, const EvalOptions& opts = {});

} // namespace lcz
