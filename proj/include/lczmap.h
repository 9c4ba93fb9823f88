/*
 * lczmap — land-cover classification pipeline over 10-band raster stacks.
 *
 * C API: opaque handles plus status codes. Every function that can fail
 * returns lcz_status; on failure lcz_last_error() describes the problem
 * (the message is thread-local). Out-parameters are written only on
 * LCZ_OK. Handles are freed with their matching *_free function.
 */
#ifndef LCZMAP_H
#define LCZMAP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lcz_status {
    LCZ_OK = 0,
    LCZ_ERR_IO = 1,          /* missing/unreadable/unwritable files */
    LCZ_ERR_INVALID = 2,     /* violated precondition or malformed input */
    LCZ_ERR_NUMERIC = 3,     /* non-finite values, diverged training */
    LCZ_ERR_UNSUPPORTED = 4  /* recognized file but unsupported variant */
} lcz_status;

const char* lcz_last_error(void);
const char* lcz_version(void);

typedef struct lcz_raster lcz_raster;       /* width x height x bands float32 stack */
typedef struct lcz_labelmap lcz_labelmap;   /* width x height class-id grid */
typedef struct lcz_samples lcz_samples;     /* point samples, optionally split */
typedef struct lcz_patchset lcz_patchset;   /* labeled 11x11x10 patches */
typedef struct lcz_model lcz_model;         /* trained classifier of any kind */
typedef struct lcz_metrics lcz_metrics;     /* confusion matrix + derived scores */
typedef struct lcz_scene_spec lcz_scene_spec; /* synthetic-scene recipe */

/* ------------------------------------------------------------------ */
/* Raster stacks                                                      */

lcz_status lcz_raster_load(const char* header_path, lcz_raster** out);
lcz_status lcz_raster_save(const lcz_raster* raster, const char* header_path);
/* data may be NULL for a zero-filled stack; otherwise width*height*bands
 * floats, band-sequential. */
lcz_status lcz_raster_create(int32_t width, int32_t height, int32_t bands, const float* data,
                             lcz_raster** out);
void lcz_raster_free(lcz_raster* raster);
int32_t lcz_raster_width(const lcz_raster* raster);
int32_t lcz_raster_height(const lcz_raster* raster);
int32_t lcz_raster_bands(const lcz_raster* raster);
const float* lcz_raster_data(const lcz_raster* raster);

/* Divide every value by the global maximum over all bands. */
lcz_status lcz_raster_normalize(const lcz_raster* raster, lcz_raster** out);
/* High-pass-filter pansharpening: 4 fine bands + 6 coarse bands at half
 * resolution -> 6 sharpened bands at the fine grid. */
lcz_status lcz_pansharpen(const lcz_raster* fine, const lcz_raster* coarse, lcz_raster** out);

/* ------------------------------------------------------------------ */
/* Label maps                                                         */

lcz_status lcz_labelmap_load(const char* header_path, lcz_labelmap** out);
lcz_status lcz_labelmap_save(const lcz_labelmap* map, const char* header_path);
lcz_status lcz_labelmap_create(int32_t width, int32_t height, const uint8_t* labels,
                               lcz_labelmap** out);
void lcz_labelmap_free(lcz_labelmap* map);
int32_t lcz_labelmap_width(const lcz_labelmap* map);
int32_t lcz_labelmap_height(const lcz_labelmap* map);
const uint8_t* lcz_labelmap_data(const lcz_labelmap* map);

/* Sliding mode filter (odd kernel, reflect-padded, ties to lowest id). */
lcz_status lcz_majority_vote(const lcz_labelmap* map, int32_t kernel, lcz_labelmap** out);
/* Block-majority aggregation to a ceil(dims/block) grid. */
lcz_status lcz_aggregate(const lcz_labelmap* map, int32_t block, lcz_labelmap** out);
/* Render as 8-bit RGB PNG. palette_csv may be NULL for the built-in
 * palette; rows are "class_id,R,G,B". */
lcz_status lcz_render(const lcz_labelmap* map, const char* palette_csv, const char* png_path);

/* ------------------------------------------------------------------ */
/* Synthetic scenes                                                   */

/* Built-in recipes: "lcz14" and "texture2". */
lcz_status lcz_scene_spec_builtin(const char* name, lcz_scene_spec** out);
lcz_status lcz_scene_spec_load(const char* path, lcz_scene_spec** out);
lcz_status lcz_scene_spec_save(const lcz_scene_spec* spec, const char* path);
lcz_status lcz_scene_spec_set_size(lcz_scene_spec* spec, int32_t width, int32_t height);
lcz_status lcz_scene_spec_set_noise(lcz_scene_spec* spec, double sigma);
lcz_status lcz_scene_spec_set_tile(lcz_scene_spec* spec, int32_t tile);
lcz_status lcz_scene_spec_set_layout_seed(lcz_scene_spec* spec, uint64_t seed);
void lcz_scene_spec_free(lcz_scene_spec* spec);

/* Deterministic in (spec, seed); emits the stack and the ground truth. */
lcz_status lcz_synth_scene(const lcz_scene_spec* spec, uint64_t seed, lcz_raster** raster,
                           lcz_labelmap** truth);
/* Uniform in-margin point samples per class present in the truth map. */
lcz_status lcz_sample_truth(const lcz_labelmap* truth, int32_t per_class, uint64_t seed,
                            lcz_samples** out);

/* ------------------------------------------------------------------ */
/* Samples and patches                                                */

lcz_status lcz_samples_load(const char* csv_path, int32_t raster_width, int32_t raster_height,
                            lcz_samples** out);
lcz_status lcz_samples_save(const lcz_samples* samples, const char* csv_path);
void lcz_samples_free(lcz_samples* samples);
int32_t lcz_samples_count(const lcz_samples* samples);

/* Stratified 5:2:3 split; deterministic per seed. */
lcz_status lcz_split(lcz_samples* samples, uint64_t seed);
lcz_status lcz_split_counts(const lcz_samples* samples, int32_t* train, int32_t* val,
                            int32_t* test);
lcz_status lcz_split_save(const lcz_samples* samples, const char* csv_path);
lcz_status lcz_split_load(const char* csv_path, int32_t raster_width, int32_t raster_height,
                          lcz_samples** out);

/* set: 0 train, 1 val, 2 test, 3 train+val merged, -1 all samples. */
lcz_status lcz_extract_patches(const lcz_raster* raster, const lcz_samples* samples, int32_t set,
                               lcz_patchset** out);
/* Originals plus three quarter-turn rotations (4N patches). */
lcz_status lcz_augment(const lcz_patchset* patches, lcz_patchset** out);
lcz_status lcz_patchset_save(const lcz_patchset* patches, const char* path);
lcz_status lcz_patchset_load(const char* path, lcz_patchset** out);
int32_t lcz_patchset_count(const lcz_patchset* patches);
void lcz_patchset_free(lcz_patchset* patches);

/* ------------------------------------------------------------------ */
/* Training                                                           */

typedef struct lcz_train_config {
    int32_t epochs;       /* <= 0 -> per-kind default: cnn 300, ann 250, svm 20 */
    int32_t batch;        /* minibatch size, default 32 */
    double learning_rate; /* default 1e-3 */
    int32_t optimizer;    /* 0 adam (default), 1 sgd */
    uint64_t seed;
    int32_t dropout;      /* nonzero: dropout enabled (cnn/ann), default on */
    int32_t kernel_size;  /* cnn kernel, one of 1/3/5, default 3 */
    int32_t trees;        /* random forest size, default 32 */
    double svm_lambda;    /* SVM L2 strength, default 1e-4 */
    int32_t threads;      /* 0 -> single-threaded (or LCZPIPE_THREADS) */
} lcz_train_config;

void lcz_train_config_init(lcz_train_config* cfg);

/* CNN trains on patches as-is (pass the augmented sets). The pixel
 * baselines derive their 121 rows per patch internally. val may be NULL.
 * history_csv may be NULL; when given, per-epoch loss/accuracy is written
 * there (cnn/ann only). */
lcz_status lcz_train_cnn(const lcz_patchset* train, const lcz_patchset* val,
                         const lcz_train_config* cfg, const char* history_csv, lcz_model** out);
lcz_status lcz_train_ann(const lcz_patchset* train, const lcz_patchset* val,
                         const lcz_train_config* cfg, const char* history_csv, lcz_model** out);
lcz_status lcz_train_rf(const lcz_patchset* train, const lcz_train_config* cfg, lcz_model** out);
lcz_status lcz_train_svm(const lcz_patchset* train, const lcz_train_config* cfg, lcz_model** out);

lcz_status lcz_model_save(const lcz_model* model, const char* path);
lcz_status lcz_model_load(const char* path, lcz_model** out);
/* 0 cnn, 1 ann, 2 rf, 3 svm. */
int32_t lcz_model_kind(const lcz_model* model);
void lcz_model_free(lcz_model* model);

/* ------------------------------------------------------------------ */
/* Inference and evaluation                                           */

/* Full-map classification. CNN models slide an 11x11 window with stride 1
 * over the reflect-padded stack; pixel models classify each spectrum.
 * threads 0 = automatic (capped by LCZPIPE_THREADS); the result is
 * identical for every thread count. */
lcz_status lcz_classify_map(const lcz_model* model, const lcz_raster* raster, int32_t threads,
                            lcz_labelmap** out);

/* Evaluation protocol on the split's test set. CNN: per-patch prediction.
 * Baselines: full pixel map, majority-vote regularization with mv_kernel,
 * then the map is read at each test sample (center pixel, or the modal
 * class of its 11x11 window when patch_vote is nonzero); pre-vote metrics
 * are kept as a secondary block. */
lcz_status lcz_evaluate(const lcz_model* model, const lcz_raster* raster,
                        const lcz_samples* split_samples, int32_t mv_kernel, int32_t patch_vote,
                        int32_t threads, lcz_metrics** out);

/* Pixel-by-pixel comparison of two equally-sized label maps. */
lcz_status lcz_metrics_from_maps(const lcz_labelmap* pred, const lcz_labelmap* truth,
                                 lcz_metrics** out);

double lcz_metrics_oa(const lcz_metrics* metrics);
double lcz_metrics_kappa(const lcz_metrics* metrics);
/* Pre-regularization block (baselines only): LCZ_ERR_INVALID when absent. */
lcz_status lcz_metrics_raw_oa(const lcz_metrics* metrics, double* oa);
lcz_status lcz_metrics_save(const lcz_metrics* metrics, const char* json_path,
                            const char* text_path);
void lcz_metrics_free(lcz_metrics* metrics);

/* ------------------------------------------------------------------ */
/* Utilities                                                          */

/* SHA-256 of a file; out_hex must hold at least 65 bytes. */
lcz_status lcz_hash_file(const char* path, char* out_hex);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LCZMAP_H */
