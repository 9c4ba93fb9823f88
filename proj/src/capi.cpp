#include "lczmap.h"

#include <cstring>
#include <string>

#include "lczmap/baselines.hpp"
#include "lczmap/error.hpp"
#include "lczmap/labelmap.hpp"
#include "lczmap/metrics.hpp"
#include "lczmap/model.hpp"
#include "lczmap/nn.hpp"
#include "lczmap/pipeline.hpp"
#include "lczmap/raster.hpp"
#include "lczmap/render.hpp"
#include "lczmap/sampling.hpp"
#include "lczmap/sha256.hpp"
#include "lczmap/spatial.hpp"
#include "lczmap/synth.hpp"

// Handle definitions: thin value wrappers around the core types.

struct lcz_raster {
    lcz::RasterStack v;
};
struct lcz_labelmap {
    lcz::LabelMap v;
};
struct lcz_samples {
    std::vector<lcz::PointSample> all;
    lcz::DatasetSplit split;
    bool has_split = false;
};
struct lcz_patchset {
    std::vector<lcz::Patch> v;
};
struct lcz_model {
    lcz::Model v;
};
struct lcz_metrics {
    lcz::EvalReport v;
};
struct lcz_scene_spec {
    lcz::SynthSceneSpec v;
};

namespace {

thread_local std::string g_last_error;

lcz_status code_of(lcz::Errc c) {
    switch (c) {
        case lcz::Errc::io: return LCZ_ERR_IO;
        case lcz::Errc::invalid: return LCZ_ERR_INVALID;
        case lcz::Errc::numeric: return LCZ_ERR_NUMERIC;
        case lcz::Errc::unsupported: return LCZ_ERR_UNSUPPORTED;
    }
    return LCZ_ERR_INVALID;
}

template <class F>
lcz_status guarded(F&& fn) {
    try {
        fn();
        return LCZ_OK;
    } catch (const lcz::Error& e) {
        g_last_error = e.what();
        return code_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LCZ_ERR_INVALID;
    } catch (...) {
        g_last_error = "unknown error";
        return LCZ_ERR_INVALID;
    }
}

void check_arg(bool ok, const char* msg) { lcz::require(ok, lcz::Errc::invalid, msg); }

lcz::TrainConfig to_core(const lcz_train_config& c, int default_epochs) {
    lcz::TrainConfig t;
    t.epochs = c.epochs > 0 ? c.epochs : default_epochs;
    t.batch = c.batch > 0 ? c.batch : 32;
    t.learning_rate = static_cast<float>(c.learning_rate);
    t.optimizer = c.optimizer == 1 ? lcz::Optimizer::sgd : lcz::Optimizer::adam;
    t.seed = c.seed;
    t.dropout = c.dropout != 0;
    t.threads = lcz::resolve_threads_training(c.threads);
    return t;
}

} // namespace

extern "C" {

const char* lcz_last_error(void) { return g_last_error.c_str(); }
const char* lcz_version(void) { return "0.1.0"; }

/* ------------------------------------------------------------------ */

lcz_status lcz_raster_load(const char* header_path, lcz_raster** out) {
    return guarded([&] {
        check_arg(header_path && out, "null argument");
        *out = new lcz_raster{lcz::load_raster(header_path)};
    });
}

lcz_status lcz_raster_save(const lcz_raster* raster, const char* header_path) {
    return guarded([&] {
        check_arg(raster && header_path, "null argument");
        lcz::save_raster(raster->v, header_path);
    });
}

lcz_status lcz_raster_create(int32_t width, int32_t height, int32_t bands, const float* data,
                             lcz_raster** out) {
    return guarded([&] {
        check_arg(out, "null argument");
        lcz::RasterStack s(width, height, bands);
        if (data) std::memcpy(s.data.data(), data, s.size() * sizeof(float));
        s.validate();
        *out = new lcz_raster{std::move(s)};
    });
}

void lcz_raster_free(lcz_raster* raster) { delete raster; }

int32_t lcz_raster_width(const lcz_raster* raster) { return raster ? raster->v.width : 0; }
int32_t lcz_raster_height(const lcz_raster* raster) { return raster ? raster->v.height : 0; }
int32_t lcz_raster_bands(const lcz_raster* raster) { return raster ? raster->v.bands : 0; }
const float* lcz_raster_data(const lcz_raster* raster) {
    return raster ? raster->v.data.data() : nullptr;
}

lcz_status lcz_raster_normalize(const lcz_raster* raster, lcz_raster** out) {
    return guarded([&] {
        check_arg(raster && out, "null argument");
        *out = new lcz_raster{lcz::normalize(raster->v)};
    });
}

lcz_status lcz_pansharpen(const lcz_raster* fine, const lcz_raster* coarse, lcz_raster** out) {
    return guarded([&] {
        check_arg(fine && coarse && out, "null argument");
        *out = new lcz_raster{lcz::pansharpen(fine->v, coarse->v)};
    });
}

/* ------------------------------------------------------------------ */

lcz_status lcz_labelmap_load(const char* header_path, lcz_labelmap** out) {
    return guarded([&] {
        check_arg(header_path && out, "null argument");
        *out = new lcz_labelmap{lcz::load_labelmap(header_path)};
    });
}

lcz_status lcz_labelmap_save(const lcz_labelmap* map, const char* header_path) {
    return guarded([&] {
        check_arg(map && header_path, "null argument");
        lcz::save_labelmap(map->v, header_path);
    });
}

lcz_status lcz_labelmap_create(int32_t width, int32_t height, const uint8_t* labels,
                               lcz_labelmap** out) {
    return guarded([&] {
        check_arg(out, "null argument");
        lcz::LabelMap m(width, height);
        if (labels) std::memcpy(m.labels.data(), labels, m.labels.size());
        m.validate();
        *out = new lcz_labelmap{std::move(m)};
    });
}

void lcz_labelmap_free(lcz_labelmap* map) { delete map; }

int32_t lcz_labelmap_width(const lcz_labelmap* map) { return map ? map->v.width : 0; }
int32_t lcz_labelmap_height(const lcz_labelmap* map) { return map ? map->v.height : 0; }
const uint8_t* lcz_labelmap_data(const lcz_labelmap* map) {
    return map ? map->v.labels.data() : nullptr;
}

lcz_status lcz_majority_vote(const lcz_labelmap* map, int32_t kernel, lcz_labelmap** out) {
    return guarded([&] {
        check_arg(map && out, "null argument");
        *out = new lcz_labelmap{lcz::majority_vote(map->v, kernel)};
    });
}

lcz_status lcz_aggregate(const lcz_labelmap* map, int32_t block, lcz_labelmap** out) {
    return guarded([&] {
        check_arg(map && out, "null argument");
        *out = new lcz_labelmap{lcz::aggregate_to_lcz(map->v, block)};
    });
}

lcz_status lcz_render(const lcz_labelmap* map, const char* palette_csv, const char* png_path) {
    return guarded([&] {
        check_arg(map && png_path, "null argument");
        lcz::Palette pal = palette_csv ? lcz::load_palette_csv(palette_csv) : lcz::default_palette();
        lcz::render_map(map->v, pal, png_path);
    });
}

/* ------------------------------------------------------------------ */

lcz_status lcz_scene_spec_builtin(const char* name, lcz_scene_spec** out) {
    return guarded([&] {
        check_arg(name && out, "null argument");
        *out = new lcz_scene_spec{lcz::builtin_scene_spec(name)};
    });
}

lcz_status lcz_scene_spec_load(const char* path, lcz_scene_spec** out) {
    return guarded([&] {
        check_arg(path && out, "null argument");
        *out = new lcz_scene_spec{lcz::load_scene_spec(path)};
    });
}

lcz_status lcz_scene_spec_save(const lcz_scene_spec* spec, const char* path) {
    return guarded([&] {
        check_arg(spec && path, "null argument");
        lcz::save_scene_spec(spec->v, path);
    });
}

lcz_status lcz_scene_spec_set_size(lcz_scene_spec* spec, int32_t width, int32_t height) {
    return guarded([&] {
        check_arg(spec != nullptr, "null argument");
        spec->v.width = width;
        spec->v.height = height;
        spec->v.validate();
    });
}

lcz_status lcz_scene_spec_set_noise(lcz_scene_spec* spec, double sigma) {
    return guarded([&] {
        check_arg(spec != nullptr, "null argument");
        spec->v.noise_sigma = static_cast<float>(sigma);
        spec->v.validate();
    });
}

lcz_status lcz_scene_spec_set_tile(lcz_scene_spec* spec, int32_t tile) {
    return guarded([&] {
        check_arg(spec != nullptr, "null argument");
        spec->v.tile = tile;
        spec->v.validate();
    });
}

lcz_status lcz_scene_spec_set_layout_seed(lcz_scene_spec* spec, uint64_t seed) {
    return guarded([&] {
        check_arg(spec != nullptr, "null argument");
        spec->v.layout_seed = seed;
    });
}

void lcz_scene_spec_free(lcz_scene_spec* spec) { delete spec; }

lcz_status lcz_synth_scene(const lcz_scene_spec* spec, uint64_t seed, lcz_raster** raster,
                           lcz_labelmap** truth) {
    return guarded([&] {
        check_arg(spec && raster && truth, "null argument");
        auto [r, t] = lcz::synth_scene(spec->v, seed);
        *raster = new lcz_raster{std::move(r)};
        *truth = new lcz_labelmap{std::move(t)};
    });
}

lcz_status lcz_sample_truth(const lcz_labelmap* truth, int32_t per_class, uint64_t seed,
                            lcz_samples** out) {
    return guarded([&] {
        check_arg(truth && out, "null argument");
        auto s = new lcz_samples{};
        s->all = lcz::sample_truth(truth->v, per_class, seed);
        *out = s;
    });
}

/* ------------------------------------------------------------------ */

lcz_status lcz_samples_load(const char* csv_path, int32_t raster_width, int32_t raster_height,
                            lcz_samples** out) {
    return guarded([&] {
        check_arg(csv_path && out, "null argument");
        auto s = new lcz_samples{};
        s->all = lcz::load_samples(csv_path, raster_width, raster_height);
        *out = s;
    });
}

lcz_status lcz_samples_save(const lcz_samples* samples, const char* csv_path) {
    return guarded([&] {
        check_arg(samples && csv_path, "null argument");
        lcz::save_samples(samples->all, csv_path);
    });
}

void lcz_samples_free(lcz_samples* samples) { delete samples; }

int32_t lcz_samples_count(const lcz_samples* samples) {
    return samples ? static_cast<int32_t>(samples->all.size()) : 0;
}

lcz_status lcz_split(lcz_samples* samples, uint64_t seed) {
    return guarded([&] {
        check_arg(samples != nullptr, "null argument");
        samples->split = lcz::split_samples(samples->all, seed);
        samples->has_split = true;
    });
}

lcz_status lcz_split_counts(const lcz_samples* samples, int32_t* train, int32_t* val,
                            int32_t* test) {
    return guarded([&] {
        check_arg(samples && train && val && test, "null argument");
        check_arg(samples->has_split, "samples are not split yet");
        *train = static_cast<int32_t>(samples->split.train.size());
        *val = static_cast<int32_t>(samples->split.val.size());
        *test = static_cast<int32_t>(samples->split.test.size());
    });
}

lcz_status lcz_split_save(const lcz_samples* samples, const char* csv_path) {
    return guarded([&] {
        check_arg(samples && csv_path, "null argument");
        check_arg(samples->has_split, "samples are not split yet");
        lcz::save_split_csv(samples->split, csv_path);
    });
}

lcz_status lcz_split_load(const char* csv_path, int32_t raster_width, int32_t raster_height,
                          lcz_samples** out) {
    return guarded([&] {
        check_arg(csv_path && out, "null argument");
        auto s = new lcz_samples{};
        s->split = lcz::load_split_csv(csv_path, raster_width, raster_height);
        s->has_split = true;
        s->all = s->split.train;
        s->all.insert(s->all.end(), s->split.val.begin(), s->split.val.end());
        s->all.insert(s->all.end(), s->split.test.begin(), s->split.test.end());
        *out = s;
    });
}

lcz_status lcz_extract_patches(const lcz_raster* raster, const lcz_samples* samples, int32_t set,
                               lcz_patchset** out) {
    return guarded([&] {
        check_arg(raster && samples && out, "null argument");
        check_arg(set >= -1 && set <= 3, "set must be -1, 0, 1, 2 or 3");
        if (set >= 0) check_arg(samples->has_split, "samples are not split yet");
        if (set == 3) {
            std::vector<lcz::PointSample> merged = samples->split.train;
            merged.insert(merged.end(), samples->split.val.begin(), samples->split.val.end());
            *out = new lcz_patchset{lcz::extract_patches(raster->v, merged)};
            return;
        }
        const std::vector<lcz::PointSample>* src = nullptr;
        switch (set) {
            case -1: src = &samples->all; break;
            case 0: src = &samples->split.train; break;
            case 1: src = &samples->split.val; break;
            default: src = &samples->split.test; break;
        }
        *out = new lcz_patchset{lcz::extract_patches(raster->v, *src)};
    });
}

lcz_status lcz_augment(const lcz_patchset* patches, lcz_patchset** out) {
    return guarded([&] {
        check_arg(patches && out, "null argument");
        *out = new lcz_patchset{lcz::augment(patches->v)};
    });
}

lcz_status lcz_patchset_save(const lcz_patchset* patches, const char* path) {
    return guarded([&] {
        check_arg(patches && path, "null argument");
        lcz::save_patches(patches->v, path);
    });
}

lcz_status lcz_patchset_load(const char* path, lcz_patchset** out) {
    return guarded([&] {
        check_arg(path && out, "null argument");
        *out = new lcz_patchset{lcz::load_patches(path)};
    });
}

int32_t lcz_patchset_count(const lcz_patchset* patches) {
    return patches ? static_cast<int32_t>(patches->v.size()) : 0;
}

void lcz_patchset_free(lcz_patchset* patches) { delete patches; }

/* ------------------------------------------------------------------ */

void lcz_train_config_init(lcz_train_config* cfg) {
    if (!cfg) return;
    cfg->epochs = 0;
    cfg->batch = 32;
    cfg->learning_rate = 1e-3;
    cfg->optimizer = 0;
    cfg->seed = 0;
    cfg->dropout = 1;
    cfg->kernel_size = 3;
    cfg->trees = lcz::kForestDefaultTrees;
    cfg->svm_lambda = 1e-4;
    cfg->threads = 0;
}

lcz_status lcz_train_cnn(const lcz_patchset* train, const lcz_patchset* val,
                         const lcz_train_config* cfg, const char* history_csv, lcz_model** out) {
    return guarded([&] {
        check_arg(train && cfg && out, "null argument");
        lcz::TrainConfig t = to_core(*cfg, 300);
        lcz::CnnModel model = lcz::build_model<float>(cfg->kernel_size, cfg->seed);
        static const std::vector<lcz::Patch> empty;
        lcz::TrainHistory h = lcz::train_cnn(model, train->v, val ? val->v : empty, t);
        if (history_csv) lcz::save_history_csv(h, history_csv);
        *out = new lcz_model{lcz::Model{std::move(model)}};
    });
}

lcz_status lcz_train_ann(const lcz_patchset* train, const lcz_patchset* val,
                         const lcz_train_config* cfg, const char* history_csv, lcz_model** out) {
    return guarded([&] {
        check_arg(train && cfg && out, "null argument");
        lcz::TrainConfig t = to_core(*cfg, 250);
        lcz::AnnModel model = lcz::build_ann(cfg->seed);
        std::vector<lcz::PixelRow> rows = lcz::patches_to_rows(train->v);
        std::vector<lcz::PixelRow> val_rows;
        if (val) val_rows = lcz::patches_to_rows(val->v);
        lcz::TrainHistory h = lcz::train_ann(model, rows, val_rows, t);
        if (history_csv) lcz::save_history_csv(h, history_csv);
        *out = new lcz_model{lcz::Model{std::move(model)}};
    });
}

lcz_status lcz_train_rf(const lcz_patchset* train, const lcz_train_config* cfg, lcz_model** out) {
    return guarded([&] {
        check_arg(train && cfg && out, "null argument");
        std::vector<lcz::PixelRow> rows = lcz::patches_to_rows(train->v);
        int trees = cfg->trees > 0 ? cfg->trees : lcz::kForestDefaultTrees;
        lcz::Forest f =
            lcz::train_rf(rows, trees, cfg->seed, lcz::resolve_threads_training(cfg->threads));
        *out = new lcz_model{lcz::Model{std::move(f)}};
    });
}

lcz_status lcz_train_svm(const lcz_patchset* train, const lcz_train_config* cfg, lcz_model** out) {
    return guarded([&] {
        check_arg(train && cfg && out, "null argument");
        std::vector<lcz::PixelRow> rows = lcz::patches_to_rows(train->v);
        lcz::SvmConfig sc;
        sc.epochs = cfg->epochs > 0 ? cfg->epochs : 20;
        sc.lambda = cfg->svm_lambda > 0 ? cfg->svm_lambda : 1e-4;
        sc.seed = cfg->seed;
        *out = new lcz_model{lcz::Model{lcz::train_svm(rows, sc)}};
    });
}

lcz_status lcz_model_save(const lcz_model* model, const char* path) {
    return guarded([&] {
        check_arg(model && path, "null argument");
        lcz::save_model(model->v, path);
    });
}

lcz_status lcz_model_load(const char* path, lcz_model** out) {
    return guarded([&] {
        check_arg(path && out, "null argument");
        *out = new lcz_model{lcz::load_model(path)};
    });
}

int32_t lcz_model_kind(const lcz_model* model) {
    return model ? static_cast<int32_t>(model->v.kind()) : -1;
}

void lcz_model_free(lcz_model* model) { delete model; }

/* ------------------------------------------------------------------ */

lcz_status lcz_classify_map(const lcz_model* model, const lcz_raster* raster, int32_t threads,
                            lcz_labelmap** out) {
    return guarded([&] {
        check_arg(model && raster && out, "null argument");
        *out = new lcz_labelmap{lcz::classify_map(model->v, raster->v, threads)};
    });
}

lcz_status lcz_evaluate(const lcz_model* model, const lcz_raster* raster,
                        const lcz_samples* split_samples, int32_t mv_kernel, int32_t patch_vote,
                        int32_t threads, lcz_metrics** out) {
    return guarded([&] {
        check_arg(model && raster && split_samples && out, "null argument");
        check_arg(split_samples->has_split, "samples are not split yet");
        lcz::EvalOptions opts;
        opts.mv_kernel = mv_kernel > 0 ? mv_kernel : 11;
        opts.patch_vote = patch_vote != 0;
        opts.threads = threads;
        *out = new lcz_metrics{
            lcz::evaluate_protocol(model->v, raster->v, split_samples->split, opts)};
    });
}

lcz_status lcz_metrics_from_maps(const lcz_labelmap* pred, const lcz_labelmap* truth,
                                 lcz_metrics** out) {
    return guarded([&] {
        check_arg(pred && truth && out, "null argument");
        check_arg(pred->v.width == truth->v.width && pred->v.height == truth->v.height,
                  "label map dims differ");
        lcz::EvalReport r;
        r.final = lcz::make_report(lcz::confusion(pred->v.labels, truth->v.labels));
        *out = new lcz_metrics{std::move(r)};
    });
}

double lcz_metrics_oa(const lcz_metrics* metrics) { return metrics ? metrics->v.final.oa : 0.0; }
double lcz_metrics_kappa(const lcz_metrics* metrics) {
    return metrics ? metrics->v.final.kappa : 0.0;
}

lcz_status lcz_metrics_raw_oa(const lcz_metrics* metrics, double* oa) {
    return guarded([&] {
        check_arg(metrics && oa, "null argument");
        check_arg(metrics->v.raw.has_value(), "metrics have no pre-regularization block");
        *oa = metrics->v.raw->oa;
    });
}

lcz_status lcz_metrics_save(const lcz_metrics* metrics, const char* json_path,
                            const char* text_path) {
    return guarded([&] {
        check_arg(metrics && json_path && text_path, "null argument");
        lcz::save_metrics(metrics->v, json_path, text_path);
    });
}

void lcz_metrics_free(lcz_metrics* metrics) { delete metrics; }

/* ------------------------------------------------------------------ */

lcz_status lcz_hash_file(const char* path, char* out_hex) {
    return guarded([&] {
        check_arg(path && out_hex, "null argument");
        std::string h = lcz::sha256_file(path);
        std::memcpy(out_hex, h.c_str(), h.size() + 1);
    });
}

} // extern "C"
