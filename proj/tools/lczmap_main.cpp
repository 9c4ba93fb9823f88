// lczmap command-line pipeline. Talks to the core exclusively through the
// shared library's C API; each subcommand writes its artifacts plus a
// manifest.json with config, input/output hashes and timings.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lczmap.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void die(const std::string& context) {
    std::fprintf(stderr, "lczmap: %s: %s\n", context.c_str(), lcz_last_error());
    std::exit(1);
}

void check(lcz_status st, const std::string& context) {
    if (st != LCZ_OK) die(context);
}

// RAII wrappers for the C handles.
template <class T, void (*F)(T*)>
struct Del {
    void operator()(T* p) const { F(p); }
};
using RasterPtr = std::unique_ptr<lcz_raster, Del<lcz_raster, lcz_raster_free>>;
using MapPtr = std::unique_ptr<lcz_labelmap, Del<lcz_labelmap, lcz_labelmap_free>>;
using SamplesPtr = std::unique_ptr<lcz_samples, Del<lcz_samples, lcz_samples_free>>;
using PatchesPtr = std::unique_ptr<lcz_patchset, Del<lcz_patchset, lcz_patchset_free>>;
using ModelPtr = std::unique_ptr<lcz_model, Del<lcz_model, lcz_model_free>>;
using MetricsPtr = std::unique_ptr<lcz_metrics, Del<lcz_metrics, lcz_metrics_free>>;
using SpecPtr = std::unique_ptr<lcz_scene_spec, Del<lcz_scene_spec, lcz_scene_spec_free>>;

RasterPtr load_raster_file(const std::string& path) {
    lcz_raster* r = nullptr;
    check(lcz_raster_load(path.c_str(), &r), "loading raster " + path);
    return RasterPtr(r);
}

MapPtr load_map_file(const std::string& path) {
    lcz_labelmap* m = nullptr;
    check(lcz_labelmap_load(path.c_str(), &m), "loading label map " + path);
    return MapPtr(m);
}

/// Tracks a run: configuration echo, hashed inputs/outputs, stage timings.
class Manifest {
public:
    Manifest(std::string command, fs::path out_dir)
        : command_(std::move(command)), out_dir_(std::move(out_dir)) {
        fs::create_directories(out_dir_);
        start_ = std::chrono::steady_clock::now();
    }

    void config(const std::string& key, const json& value) { config_[key] = value; }

    void input(const std::string& path) { add(inputs_, path); }
    void output(const std::string& path) { add(outputs_, path); }

    void stage(const std::string& name, double seconds) { timings_[name] = seconds; }

    fs::path out(const std::string& name) const { return out_dir_ / name; }

    void write() {
        json j;
        j["command"] = command_;
        j["version"] = lcz_version();
        j["config"] = config_;
        j["inputs"] = inputs_;
        j["outputs"] = outputs_;
        timings_["total"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        j["timings_s"] = timings_;
        std::ofstream f(out_dir_ / "manifest.json");
        if (!f) {
            std::fprintf(stderr, "lczmap: cannot write manifest in %s\n", out_dir_.c_str());
            std::exit(1);
        }
        f << j.dump(2) << "\n";
    }

private:
    void add(json& arr, const std::string& path) {
        json entry;
        entry["path"] = path;
        char hex[65];
        if (lcz_hash_file(path.c_str(), hex) == LCZ_OK) entry["sha256"] = hex;
        arr.push_back(entry);
        // Raster headers reference a sibling payload; pin it as well.
        fs::path p(path);
        if (p.extension() == ".hdr") {
            fs::path bin = p.parent_path() / (p.stem().string() + ".bin");
            if (fs::exists(bin)) {
                json payload;
                payload["path"] = bin.string();
                if (lcz_hash_file(bin.string().c_str(), hex) == LCZ_OK) payload["sha256"] = hex;
                arr.push_back(payload);
            }
        }
    }

    std::string command_;
    fs::path out_dir_;
    json config_ = json::object();
    json inputs_ = json::array();
    json outputs_ = json::array();
    json timings_ = json::object();
    std::chrono::steady_clock::time_point start_;
};

class Timer {
public:
    Timer() : t_(std::chrono::steady_clock::now()) {}
    double lap() {
        auto now = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(now - t_).count();
        t_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point t_;
};

// ------------------------------------------------------------------
// synth

struct SynthArgs {
    std::string out, scene = "lcz14", spec_file;
    std::uint64_t seed = 0;
    int width = 0, height = 0, tile = 0, samples_per_class = 100;
    double noise = -1.0;
};

int run_synth(const SynthArgs& a) {
    Manifest man("synth", a.out);
    man.config("scene", a.scene);
    man.config("seed", a.seed);
    man.config("samples_per_class", a.samples_per_class);
    Timer timer;

    SpecPtr spec;
    {
        lcz_scene_spec* s = nullptr;
        if (!a.spec_file.empty()) {
            check(lcz_scene_spec_load(a.spec_file.c_str(), &s), "loading scene spec");
            man.input(a.spec_file);
        } else {
            check(lcz_scene_spec_builtin(a.scene.c_str(), &s), "built-in scene spec");
        }
        spec.reset(s);
    }
    if (a.width > 0 || a.height > 0) {
        int w = a.width > 0 ? a.width : a.height;
        int h = a.height > 0 ? a.height : a.width;
        check(lcz_scene_spec_set_size(spec.get(), w, h), "scene size");
        man.config("width", w);
        man.config("height", h);
    }
    if (a.noise >= 0.0) {
        check(lcz_scene_spec_set_noise(spec.get(), a.noise), "scene noise");
        man.config("noise_sigma", a.noise);
    }
    if (a.tile > 0) {
        check(lcz_scene_spec_set_tile(spec.get(), a.tile), "scene tile");
        man.config("tile", a.tile);
    }

    lcz_raster* raster = nullptr;
    lcz_labelmap* truth = nullptr;
    check(lcz_synth_scene(spec.get(), a.seed, &raster, &truth), "scene synthesis");
    RasterPtr rp(raster);
    MapPtr tp(truth);
    man.stage("synth", timer.lap());

    std::string spec_out = man.out("scene_spec.txt").string();
    check(lcz_scene_spec_save(spec.get(), spec_out.c_str()), "writing scene spec");
    man.output(spec_out);

    std::string raster_hdr = man.out("raster.hdr").string();
    check(lcz_raster_save(raster, raster_hdr.c_str()), "writing raster");
    man.output(raster_hdr);

    std::string truth_hdr = man.out("truth.hdr").string();
    check(lcz_labelmap_save(truth, truth_hdr.c_str()), "writing truth map");
    man.output(truth_hdr);

    if (a.samples_per_class > 0) {
        lcz_samples* s = nullptr;
        check(lcz_sample_truth(truth, a.samples_per_class, a.seed + 1, &s), "sampling truth");
        SamplesPtr sp(s);
        std::string csv = man.out("samples.csv").string();
        check(lcz_samples_save(s, csv.c_str()), "writing samples");
        man.output(csv);
        std::printf("synth: %d samples over %dx%d scene\n", lcz_samples_count(s),
                    lcz_raster_width(raster), lcz_raster_height(raster));
    }
    man.stage("write", timer.lap());
    man.write();
    return 0;
}

// ------------------------------------------------------------------
// prepare

struct PrepareArgs {
    std::string raster, samples, out;
    std::uint64_t seed = 0;
    bool normalize = false;
};

int run_prepare(const PrepareArgs& a) {
    Manifest man("prepare", a.out);
    man.config("seed", a.seed);
    man.config("normalize", a.normalize);
    man.input(a.raster);
    man.input(a.samples);
    Timer timer;

    RasterPtr raster = load_raster_file(a.raster);
    if (a.normalize) {
        lcz_raster* n = nullptr;
        check(lcz_raster_normalize(raster.get(), &n), "normalizing raster");
        raster.reset(n);
    }

    lcz_samples* s = nullptr;
    check(lcz_samples_load(a.samples.c_str(), lcz_raster_width(raster.get()),
                           lcz_raster_height(raster.get()), &s),
          "loading samples");
    SamplesPtr samples(s);
    check(lcz_split(samples.get(), a.seed), "splitting samples");

    int tr = 0, va = 0, te = 0;
    check(lcz_split_counts(samples.get(), &tr, &va, &te), "split counts");
    std::printf("prepare: %d samples -> %d train / %d val / %d test\n",
                lcz_samples_count(samples.get()), tr, va, te);

    std::string split_csv = man.out("split.csv").string();
    check(lcz_split_save(samples.get(), split_csv.c_str()), "writing split CSV");
    man.output(split_csv);
    man.stage("split", timer.lap());

    auto extract = [&](int set) {
        lcz_patchset* p = nullptr;
        check(lcz_extract_patches(raster.get(), samples.get(), set, &p), "extracting patches");
        return PatchesPtr(p);
    };
    auto save = [&](const lcz_patchset* p, const std::string& name) {
        std::string path = man.out(name).string();
        check(lcz_patchset_save(p, path.c_str()), "writing " + name);
        man.output(path);
    };

    PatchesPtr train = extract(0), val = extract(1), test = extract(2);
    save(train.get(), "train.patches");
    save(val.get(), "val.patches");
    save(test.get(), "test.patches");

    // merged raw train+val for the forest/SVM trainers
    PatchesPtr merged = extract(3);
    save(merged.get(), "train_val.patches");

    // rotation augmentation is materialized for the CNN path
    auto augment = [&](const lcz_patchset* p, const std::string& name) {
        lcz_patchset* aug = nullptr;
        check(lcz_augment(p, &aug), "augmenting patches");
        PatchesPtr ap(aug);
        save(ap.get(), name);
        return lcz_patchset_count(ap.get());
    };
    int n_aug = augment(train.get(), "train_aug.patches");
    augment(val.get(), "val_aug.patches");
    std::printf("prepare: %d augmented training patches\n", n_aug);

    man.stage("extract", timer.lap());
    man.write();
    return 0;
}

// ------------------------------------------------------------------
// train

struct TrainArgs {
    std::string kind, prep, out;
    int epochs = 0, batch = 32, kernel_size = 3, trees = 32, threads = 0;
    double lr = 1e-3, svm_lambda = 1e-4;
    std::string optimizer = "adam";
    std::uint64_t seed = 0;
    bool no_dropout = false;
};

int run_train(const TrainArgs& a) {
    Manifest man("train", a.out);
    man.config("kind", a.kind);
    man.config("epochs", a.epochs);
    man.config("batch", a.batch);
    man.config("learning_rate", a.lr);
    man.config("optimizer", a.optimizer);
    man.config("kernel_size", a.kernel_size);
    man.config("trees", a.trees);
    man.config("svm_lambda", a.svm_lambda);
    man.config("seed", a.seed);
    man.config("dropout", !a.no_dropout);
    Timer timer;

    lcz_train_config cfg;
    lcz_train_config_init(&cfg);
    cfg.epochs = a.epochs;
    cfg.batch = a.batch;
    cfg.learning_rate = a.lr;
    cfg.optimizer = a.optimizer == "sgd" ? 1 : 0;
    cfg.seed = a.seed;
    cfg.dropout = a.no_dropout ? 0 : 1;
    cfg.kernel_size = a.kernel_size;
    cfg.trees = a.trees;
    cfg.svm_lambda = a.svm_lambda;
    cfg.threads = a.threads;

    auto load_patches_file = [&](const std::string& name) {
        std::string path = (fs::path(a.prep) / name).string();
        lcz_patchset* p = nullptr;
        check(lcz_patchset_load(path.c_str(), &p), "loading " + path);
        man.input(path);
        return PatchesPtr(p);
    };

    std::string history_csv = man.out("history.csv").string();
    ModelPtr model;
    lcz_model* m = nullptr;
    if (a.kind == "cnn") {
        PatchesPtr train = load_patches_file("train_aug.patches");
        PatchesPtr val = load_patches_file("val_aug.patches");
        check(lcz_train_cnn(train.get(), val.get(), &cfg, history_csv.c_str(), &m), "CNN training");
        man.output(history_csv);
    } else if (a.kind == "ann") {
        PatchesPtr train = load_patches_file("train.patches");
        PatchesPtr val = load_patches_file("val.patches");
        check(lcz_train_ann(train.get(), val.get(), &cfg, history_csv.c_str(), &m), "ANN training");
        man.output(history_csv);
    } else if (a.kind == "rf") {
        PatchesPtr train = load_patches_file("train_val.patches");
        check(lcz_train_rf(train.get(), &cfg, &m), "forest training");
    } else if (a.kind == "svm") {
        PatchesPtr train = load_patches_file("train_val.patches");
        check(lcz_train_svm(train.get(), &cfg, &m), "SVM training");
    } else {
        std::fprintf(stderr, "lczmap: unknown model kind: %s\n", a.kind.c_str());
        return 1;
    }
    model.reset(m);
    man.stage("train", timer.lap());

    std::string model_path = man.out("model.bin").string();
    check(lcz_model_save(model.get(), model_path.c_str()), "writing model");
    man.output(model_path);
    std::printf("train: %s model written to %s\n", a.kind.c_str(), model_path.c_str());

    man.stage("write", timer.lap());
    man.write();
    return 0;
}

// ------------------------------------------------------------------
// predict / regularize / aggregate / render / evaluate / metrics

struct PredictArgs {
    std::string model, raster, out;
    int threads = 0;
    bool normalize = false;
};

int run_predict(const PredictArgs& a) {
    Manifest man("predict", a.out);
    man.config("threads", a.threads);
    man.config("normalize", a.normalize);
    man.input(a.model);
    man.input(a.raster);
    Timer timer;

    lcz_model* m = nullptr;
    check(lcz_model_load(a.model.c_str(), &m), "loading model");
    ModelPtr model(m);
    RasterPtr raster = load_raster_file(a.raster);
    if (a.normalize) {
        lcz_raster* n = nullptr;
        check(lcz_raster_normalize(raster.get(), &n), "normalizing raster");
        raster.reset(n);
    }
    man.stage("load", timer.lap());

    lcz_labelmap* map = nullptr;
    check(lcz_classify_map(model.get(), raster.get(), a.threads, &map), "classifying");
    MapPtr mp(map);
    man.stage("classify", timer.lap());

    std::string out_hdr = man.out("map.hdr").string();
    check(lcz_labelmap_save(map, out_hdr.c_str()), "writing map");
    man.output(out_hdr);
    man.write();
    return 0;
}

struct MapFilterArgs {
    std::string map, out;
    int kernel = 11, block = 10;
};

int run_regularize(const MapFilterArgs& a) {
    Manifest man("regularize", a.out);
    man.config("kernel", a.kernel);
    man.input(a.map);
    MapPtr in = load_map_file(a.map);
    lcz_labelmap* out = nullptr;
    check(lcz_majority_vote(in.get(), a.kernel, &out), "majority vote");
    MapPtr op(out);
    std::string out_hdr = man.out("map.hdr").string();
    check(lcz_labelmap_save(out, out_hdr.c_str()), "writing map");
    man.output(out_hdr);
    man.write();
    return 0;
}

int run_aggregate(const MapFilterArgs& a) {
    Manifest man("aggregate", a.out);
    man.config("block", a.block);
    man.input(a.map);
    MapPtr in = load_map_file(a.map);
    lcz_labelmap* out = nullptr;
    check(lcz_aggregate(in.get(), a.block, &out), "aggregation");
    MapPtr op(out);
    std::string out_hdr = man.out("map.hdr").string();
    check(lcz_labelmap_save(out, out_hdr.c_str()), "writing map");
    man.output(out_hdr);
    man.write();
    return 0;
}

struct RenderArgs {
    std::string map, palette, out;
};

int run_render(const RenderArgs& a) {
    Manifest man("render", a.out);
    man.input(a.map);
    if (!a.palette.empty()) man.input(a.palette);
    MapPtr in = load_map_file(a.map);
    std::string png = man.out("map.png").string();
    check(lcz_render(in.get(), a.palette.empty() ? nullptr : a.palette.c_str(), png.c_str()),
          "rendering PNG");
    man.output(png);
    man.write();
    return 0;
}

struct EvaluateArgs {
    std::string model, raster, split, out;
    int mv_kernel = 11, threads = 0;
    bool patch_vote = false, normalize = false;
};

int run_evaluate(const EvaluateArgs& a) {
    Manifest man("evaluate", a.out);
    man.config("mv_kernel", a.mv_kernel);
    man.config("patch_vote", a.patch_vote);
    man.config("normalize", a.normalize);
    man.input(a.model);
    man.input(a.raster);
    man.input(a.split);
    Timer timer;

    lcz_model* m = nullptr;
    check(lcz_model_load(a.model.c_str(), &m), "loading model");
    ModelPtr model(m);
    RasterPtr raster = load_raster_file(a.raster);
    if (a.normalize) {
        lcz_raster* n = nullptr;
        check(lcz_raster_normalize(raster.get(), &n), "normalizing raster");
        raster.reset(n);
    }
    lcz_samples* s = nullptr;
    check(lcz_split_load(a.split.c_str(), lcz_raster_width(raster.get()),
                         lcz_raster_height(raster.get()), &s),
          "loading split");
    SamplesPtr split(s);
    man.stage("load", timer.lap());

    lcz_metrics* metrics = nullptr;
    check(lcz_evaluate(model.get(), raster.get(), split.get(), a.mv_kernel,
                       a.patch_vote ? 1 : 0, a.threads, &metrics),
          "evaluation");
    MetricsPtr mp(metrics);
    man.stage("evaluate", timer.lap());

    std::string json_path = man.out("metrics.json").string();
    std::string text_path = man.out("metrics.txt").string();
    check(lcz_metrics_save(metrics, json_path.c_str(), text_path.c_str()), "writing metrics");
    man.output(json_path);
    man.output(text_path);

    std::printf("evaluate: OA %.4f kappa %.4f", lcz_metrics_oa(metrics),
                lcz_metrics_kappa(metrics));
    double raw_oa = 0.0;
    if (lcz_metrics_raw_oa(metrics, &raw_oa) == LCZ_OK) std::printf(" (raw OA %.4f)", raw_oa);
    std::printf("\n");

    man.write();
    return 0;
}

struct MetricsArgs {
    std::string pred, truth, out;
};

int run_metrics(const MetricsArgs& a) {
    Manifest man("metrics", a.out);
    man.input(a.pred);
    man.input(a.truth);
    MapPtr pred = load_map_file(a.pred);
    MapPtr truth = load_map_file(a.truth);
    lcz_metrics* metrics = nullptr;
    check(lcz_metrics_from_maps(pred.get(), truth.get(), &metrics), "computing metrics");
    MetricsPtr mp(metrics);
    std::string json_path = man.out("metrics.json").string();
    std::string text_path = man.out("metrics.txt").string();
    check(lcz_metrics_save(metrics, json_path.c_str(), text_path.c_str()), "writing metrics");
    man.output(json_path);
    man.output(text_path);
    std::printf("metrics: OA %.4f kappa %.4f\n", lcz_metrics_oa(metrics),
                lcz_metrics_kappa(metrics));
    man.write();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lczmap: spatial-spectral land-cover classification pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", lcz_version());

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic labeled scene");
    synth_cmd->add_option("--out", synth.out, "output directory")->required();
    synth_cmd->add_option("--scene", synth.scene, "built-in scene recipe (lcz14|texture2)");
    synth_cmd->add_option("--spec", synth.spec_file, "scene spec file (overrides --scene)");
    synth_cmd->add_option("--seed", synth.seed, "scene seed");
    synth_cmd->add_option("--width", synth.width, "scene width override");
    synth_cmd->add_option("--height", synth.height, "scene height override");
    synth_cmd->add_option("--tile", synth.tile, "region tile size override");
    synth_cmd->add_option("--noise", synth.noise, "noise sigma override");
    synth_cmd->add_option("--samples-per-class", synth.samples_per_class,
                          "point samples per class (0 = none)");
    synth_cmd->set_config("--config");

    PrepareArgs prep;
    auto* prep_cmd = app.add_subcommand("prepare", "split samples and materialize patches");
    prep_cmd->add_option("--raster", prep.raster, "raster header")->required();
    prep_cmd->add_option("--samples", prep.samples, "sample CSV")->required();
    prep_cmd->add_option("--out", prep.out, "output directory")->required();
    prep_cmd->add_option("--seed", prep.seed, "split seed");
    prep_cmd->add_flag("--normalize", prep.normalize, "normalize the raster first");
    prep_cmd->set_config("--config");

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "train a classifier");
    train_cmd->add_option("--kind", train.kind, "cnn|ann|rf|svm")->required();
    train_cmd->add_option("--prep", train.prep, "prepare output directory")->required();
    train_cmd->add_option("--out", train.out, "output directory")->required();
    train_cmd->add_option("--epochs", train.epochs, "epochs (0 = kind default)");
    train_cmd->add_option("--batch", train.batch, "minibatch size");
    train_cmd->add_option("--lr", train.lr, "learning rate");
    train_cmd->add_option("--optimizer", train.optimizer, "adam|sgd");
    train_cmd->add_option("--kernel-size", train.kernel_size, "CNN kernel (1|3|5)");
    train_cmd->add_option("--trees", train.trees, "forest size");
    train_cmd->add_option("--svm-lambda", train.svm_lambda, "SVM L2 strength");
    train_cmd->add_option("--seed", train.seed, "training seed");
    train_cmd->add_option("--threads", train.threads, "intra-batch workers (0 = serial)");
    train_cmd->add_flag("--no-dropout", train.no_dropout, "disable dropout");
    train_cmd->set_config("--config");

    PredictArgs predict;
    auto* predict_cmd = app.add_subcommand("predict", "classify a full raster");
    predict_cmd->add_option("--model", predict.model, "model file")->required();
    predict_cmd->add_option("--raster", predict.raster, "raster header")->required();
    predict_cmd->add_option("--out", predict.out, "output directory")->required();
    predict_cmd->add_option("--threads", predict.threads, "worker threads (0 = auto)");
    predict_cmd->add_flag("--normalize", predict.normalize, "normalize the raster first");
    predict_cmd->set_config("--config");

    MapFilterArgs reg;
    auto* reg_cmd = app.add_subcommand("regularize", "majority-vote smoothing of a label map");
    reg_cmd->add_option("--map", reg.map, "label map header")->required();
    reg_cmd->add_option("--out", reg.out, "output directory")->required();
    reg_cmd->add_option("--kernel", reg.kernel, "vote kernel (odd)");
    reg_cmd->set_config("--config");

    MapFilterArgs agg;
    auto* agg_cmd = app.add_subcommand("aggregate", "block-majority downsampling of a label map");
    agg_cmd->add_option("--map", agg.map, "label map header")->required();
    agg_cmd->add_option("--out", agg.out, "output directory")->required();
    agg_cmd->add_option("--block", agg.block, "block edge length");
    agg_cmd->set_config("--config");

    RenderArgs render;
    auto* render_cmd = app.add_subcommand("render", "render a label map to PNG");
    render_cmd->add_option("--map", render.map, "label map header")->required();
    render_cmd->add_option("--out", render.out, "output directory")->required();
    render_cmd->add_option("--palette", render.palette, "palette CSV (default: built-in)");
    render_cmd->set_config("--config");

    EvaluateArgs eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "test-set metrics via the full protocol");
    eval_cmd->add_option("--model", eval.model, "model file")->required();
    eval_cmd->add_option("--raster", eval.raster, "raster header")->required();
    eval_cmd->add_option("--split", eval.split, "split CSV from prepare")->required();
    eval_cmd->add_option("--out", eval.out, "output directory")->required();
    eval_cmd->add_option("--mv-kernel", eval.mv_kernel, "regularization kernel");
    eval_cmd->add_option("--threads", eval.threads, "worker threads (0 = auto)");
    eval_cmd->add_flag("--patch-vote", eval.patch_vote, "read window mode instead of center pixel");
    eval_cmd->add_flag("--normalize", eval.normalize, "normalize the raster first");
    eval_cmd->set_config("--config");

    MetricsArgs metrics;
    auto* metrics_cmd = app.add_subcommand("metrics", "compare two label maps");
    metrics_cmd->add_option("--pred", metrics.pred, "predicted map header")->required();
    metrics_cmd->add_option("--truth", metrics.truth, "truth map header")->required();
    metrics_cmd->add_option("--out", metrics.out, "output directory")->required();
    metrics_cmd->set_config("--config");

    CLI11_PARSE(app, argc, argv);

    if (synth_cmd->parsed()) return run_synth(synth);
    if (prep_cmd->parsed()) return run_prepare(prep);
    if (train_cmd->parsed()) return run_train(train);
    if (predict_cmd->parsed()) return run_predict(predict);
    if (reg_cmd->parsed()) return run_regularize(reg);
    if (agg_cmd->parsed()) return run_aggregate(agg);
    if (render_cmd->parsed()) return run_render(render);
    if (eval_cmd->parsed()) return run_evaluate(eval);
    if (metrics_cmd->parsed()) return run_metrics(metrics);
    return 1;
}
