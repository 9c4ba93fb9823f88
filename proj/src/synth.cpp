#include "lczmap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lczmap/error.hpp"
#include "lczmap/rng.hpp"

namespace lcz {

void SynthSceneSpec::validate() const {
    require(width > 0 && height > 0, Errc::invalid, "scene dims must be positive");
    require(tile >= 30, Errc::invalid, "scene tile must be at least 30 pixels");
    require(noise_sigma >= 0.0f, Errc::invalid, "noise sigma must be non-negative");
    require(classes_used >= 2 && classes_used <= kClassCount, Errc::invalid,
            "classes_used must be in [2, 14]");
    for (int k = 0; k < kClassCount; ++k) {
        for (float m : classes[k].mean)
            require(m >= 0.0f && m <= 1.0f, Errc::invalid, "class spectral means must be in [0,1]");
        require(classes[k].amp >= 0.0f, Errc::invalid, "texture amplitude must be non-negative");
    }
}

namespace {

std::array<float, kPatchBands> ramp(float from, float to) {
    std::array<float, kPatchBands> m{};
    for (int b = 0; b < kPatchBands; ++b)
        m[b] = from + (to - from) * static_cast<float>(b) / (kPatchBands - 1);
    return m;
}

std::array<float, kPatchBands> constant(float v) {
    std::array<float, kPatchBands> m{};
    m.fill(v);
    return m;
}

std::array<float, kPatchBands> alternating(float lo, float hi, bool lo_first) {
    std::array<float, kPatchBands> m{};
    for (int b = 0; b < kPatchBands; ++b) m[b] = ((b % 2 == 0) == lo_first) ? lo : hi;
    return m;
}

std::array<float, kPatchBands> step(float first_half, float second_half) {
    std::array<float, kPatchBands> m{};
    for (int b = 0; b < kPatchBands; ++b) m[b] = b < kPatchBands / 2 ? first_half : second_half;
    return m;
}

} // namespace

SynthSceneSpec builtin_scene_spec(const std::string& name) {
    SynthSceneSpec s;
    if (name == "lcz14") {
        s.width = 512;
        s.height = 512;
        s.tile = 64;
        s.noise_sigma = 0.12f;
        s.layout_seed = 1;
        s.classes_used = kClassCount;
        const float a = 0.06f;
        // Four pairs share a spectral mean and differ only in texture.
        s.classes[0] = {ramp(0.20f, 0.65f), TextureKind::checker, a};
        s.classes[1] = {ramp(0.20f, 0.65f), TextureKind::stripes, a};
        s.classes[2] = {ramp(0.65f, 0.20f), TextureKind::checker, a};
        s.classes[3] = {ramp(0.65f, 0.20f), TextureKind::stripes, a};
        s.classes[4] = {constant(0.30f), TextureKind::checker, a};
        s.classes[5] = {constant(0.30f), TextureKind::stripes, a};
        s.classes[6] = {constant(0.70f), TextureKind::checker, a};
        s.classes[7] = {constant(0.70f), TextureKind::stripes, a};
        // Distinct spectra; 10 and 11 sit close so per-pixel classifiers
        // make noise errors that spatial regularization can repair.
        s.classes[8] = {alternating(0.10f, 0.80f, true), TextureKind::flat, 0.0f};
        s.classes[9] = {alternating(0.10f, 0.80f, false), TextureKind::speckle, a};
        s.classes[10] = {ramp(0.90f, 0.45f), TextureKind::flat, 0.0f};
        s.classes[11] = {ramp(0.97f, 0.52f), TextureKind::speckle, a};
        s.classes[12] = {step(0.50f, 0.90f), TextureKind::flat, 0.0f};
        s.classes[13] = {step(0.90f, 0.50f), TextureKind::checker, a};
    } else if (name == "texture2") {
        s.width = 384;
        s.height = 384;
        s.tile = 64;
        s.noise_sigma = 0.04f;
        s.layout_seed = 1;
        s.classes_used = 2;
        const float a = 0.06f;
        s.classes[0] = {constant(0.50f), TextureKind::checker, a};
        s.classes[1] = {constant(0.50f), TextureKind::stripes, a};
        for (int k = 2; k < kClassCount; ++k) s.classes[k] = {constant(0.50f), TextureKind::flat, 0.0f};
    } else {
        fail(Errc::invalid, "unknown built-in scene spec: " + name);
    }
    s.validate();
    return s;
}

namespace {

TextureKind parse_texture(const std::string& s) {
    if (s == "flat") return TextureKind::flat;
    if (s == "checker") return TextureKind::checker;
    if (s == "stripes") return TextureKind::stripes;
    if (s == "speckle") return TextureKind::speckle;
    fail(Errc::invalid, "unknown texture kind: " + s);
}

const char* texture_name(TextureKind k) {
    switch (k) {
        case TextureKind::flat: return "flat";
        case TextureKind::checker: return "checker";
        case TextureKind::stripes: return "stripes";
        default: return "speckle";
    }
}

} // namespace

SynthSceneSpec load_scene_spec(const std::string& path) {
    std::ifstream f(path);
    require(static_cast<bool>(f), Errc::io, "cannot open scene spec: " + path);

    SynthSceneSpec s = builtin_scene_spec("lcz14"); // defaults for unspecified classes
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t eq = line.find('=');
        require(eq != std::string::npos, Errc::invalid, "malformed spec line: " + line);
        auto trim = [](std::string x) {
            std::size_t a = x.find_first_not_of(" \t");
            std::size_t b = x.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : x.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "width") s.width = std::stoi(val);
        else if (key == "height") s.height = std::stoi(val);
        else if (key == "tile") s.tile = std::stoi(val);
        else if (key == "noise_sigma") s.noise_sigma = std::stof(val);
        else if (key == "layout_seed") s.layout_seed = std::stoull(val);
        else if (key == "classes_used") s.classes_used = std::stoi(val);
        else if (key.rfind("class", 0) == 0) {
            std::size_t dot = key.find('.');
            require(dot != std::string::npos, Errc::invalid, "malformed class key: " + key);
            int k = std::stoi(key.substr(5, dot - 5));
            require(k >= 0 && k < kClassCount, Errc::invalid, "class index out of range: " + key);
            std::string field = key.substr(dot + 1);
            if (field == "mean") {
                std::istringstream ss(val);
                for (int b = 0; b < kPatchBands; ++b) {
                    std::string tok;
                    require(static_cast<bool>(std::getline(ss, tok, ',')), Errc::invalid,
                            "class mean needs 10 comma-separated values: " + line);
                    s.classes[k].mean[b] = std::stof(tok);
                }
            } else if (field == "texture") {
                s.classes[k].texture = parse_texture(val);
            } else if (field == "amp") {
                s.classes[k].amp = std::stof(val);
            } else {
                fail(Errc::invalid, "unknown class field: " + key);
            }
        } else {
            fail(Errc::invalid, "unknown scene spec key: " + key);
        }
    }
    s.validate();
    return s;
}

void save_scene_spec(const SynthSceneSpec& spec, const std::string& path) {
    std::ofstream f(path);
    require(static_cast<bool>(f), Errc::io, "cannot open scene spec for writing: " + path);
    f << "width=" << spec.width << "\n"
      << "height=" << spec.height << "\n"
      << "tile=" << spec.tile << "\n"
      << "noise_sigma=" << spec.noise_sigma << "\n"
      << "layout_seed=" << spec.layout_seed << "\n"
      << "classes_used=" << spec.classes_used << "\n";
    for (int k = 0; k < kClassCount; ++k) {
        f << "class" << k << ".mean=";
        for (int b = 0; b < kPatchBands; ++b) f << (b ? "," : "") << spec.classes[k].mean[b];
        f << "\nclass" << k << ".texture=" << texture_name(spec.classes[k].texture) << "\n";
        f << "class" << k << ".amp=" << spec.classes[k].amp << "\n";
    }
    require(static_cast<bool>(f), Errc::io, "write failed: " + path);
}

namespace {

double texture_field(const ClassSpec& cs, int i, int j, int cls, std::uint64_t seed) {
    const double a = cs.amp;
    switch (cs.texture) {
        case TextureKind::flat:
            return 0.0;
        case TextureKind::checker:
            return ((i + j) & 1) ? a : -a;
        case TextureKind::stripes:
            return (i & 1) ? a : -a;
        case TextureKind::speckle: {
            std::uint64_t h = splitmix64(seed ^ (static_cast<std::uint64_t>(cls) << 48) ^
                                         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 20) ^
                                         static_cast<std::uint64_t>(static_cast<std::uint32_t>(j)));
            return (h & 1) ? a : -a;
        }
    }
    return 0.0;
}

} // namespace

std::pair<RasterStack, LabelMap> synth_scene(const SynthSceneSpec& spec, std::uint64_t seed) {
    spec.validate();
    const int tile_rows = spec.height / spec.tile;
    const int tile_cols = spec.width / spec.tile;
    require(tile_rows >= 1 && tile_cols >= 1 &&
                static_cast<long>(tile_rows) * tile_cols >= spec.classes_used,
            Errc::invalid, "region layout infeasible for requested dims");

    // Round-robin class assignment over the tile grid, shuffled by the
    // layout seed so region adjacency varies between specs.
    std::vector<std::uint8_t> assign(static_cast<std::size_t>(tile_rows) * tile_cols);
    for (std::size_t t = 0; t < assign.size(); ++t)
        assign[t] = static_cast<std::uint8_t>(t % spec.classes_used);
    Rng layout_rng(spec.layout_seed);
    layout_rng.shuffle(assign);

    LabelMap truth(spec.width, spec.height);
    for (int i = 0; i < spec.height; ++i) {
        int ti = std::min(i / spec.tile, tile_rows - 1); // edge remainder absorbed
        for (int j = 0; j < spec.width; ++j) {
            int tj = std::min(j / spec.tile, tile_cols - 1);
            truth.at(i, j) = assign[static_cast<std::size_t>(ti) * tile_cols + tj];
        }
    }

    RasterStack out(spec.width, spec.height, kPatchBands, 10.0f);
    Rng noise(seed);
    const double sigma = spec.noise_sigma;
    for (int b = 0; b < kPatchBands; ++b)
        for (int i = 0; i < spec.height; ++i)
            for (int j = 0; j < spec.width; ++j) {
                int cls = truth.at(i, j);
                const ClassSpec& cs = spec.classes[cls];
                double v = static_cast<double>(cs.mean[b]) + texture_field(cs, i, j, cls, seed) +
                           sigma * noise.next_normal();
                out.at(i, j, b) = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
    return {std::move(out), std::move(truth)};
}

std::vector<PointSample> sample_truth(const LabelMap& truth, int per_class, std::uint64_t seed) {
    truth.validate();
    require(per_class > 0, Errc::invalid, "per_class must be positive");

    std::array<std::vector<std::pair<int, int>>, kClassCount> candidates;
    for (int i = kPatchRadius; i <= truth.height - kPatchRadius - 1; ++i)
        for (int j = kPatchRadius; j <= truth.width - kPatchRadius - 1; ++j)
            candidates[truth.at(i, j)].emplace_back(i, j);

    std::vector<PointSample> out;
    Rng rng(seed);
    for (int k = 0; k < kClassCount; ++k) {
        auto& cand = candidates[k];
        if (cand.empty()) continue; // class absent from the scene
        require(cand.size() >= static_cast<std::size_t>(per_class), Errc::invalid,
                "class " + std::to_string(k) + " has too few in-margin pixels to sample");
        // Partial Fisher-Yates: the first per_class entries become a
        // uniform sample without replacement.
        for (int i = 0; i < per_class; ++i) {
            std::size_t j = i + rng.next_index(cand.size() - i);
            std::swap(cand[i], cand[j]);
            out.push_back(PointSample{cand[i].first, cand[i].second, k});
        }
    }
    return out;
}

} // namespace lcz
