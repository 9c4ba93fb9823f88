#include "lczmap/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "lczmap/binio.hpp"
#include "lczmap/error.hpp"
#include "lczmap/labelmap.hpp"
#include "lczmap/rng.hpp"

namespace lcz {

void validate_sample(const PointSample& s, int raster_width, int raster_height) {
    require(s.class_id >= 0 && s.class_id < kClassCount, Errc::invalid,
            "sample class id out of range: " + std::to_string(s.class_id));
    bool in_margin = s.row >= kPatchRadius && s.row <= raster_height - kPatchRadius - 1 &&
                     s.col >= kPatchRadius && s.col <= raster_width - kPatchRadius - 1;
    if (!in_margin) {
        std::ostringstream oss;
        oss << "sample (" << s.row << "," << s.col << ") violates the " << kPatchRadius
            << "-pixel patch margin for a " << raster_width << "x" << raster_height << " raster";
        fail(Errc::invalid, oss.str());
    }
}

std::vector<PointSample> load_samples(const std::string& path, int raster_width, int raster_height) {
    std::ifstream f(path);
    require(static_cast<bool>(f), Errc::io, "cannot open sample CSV: " + path);

    std::vector<PointSample> out;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue; // header line
        }
        std::istringstream ss(line);
        PointSample s;
        char c1, c2;
        ss >> s.row >> c1 >> s.col >> c2 >> s.class_id;
        require(static_cast<bool>(ss) && c1 == ',' && c2 == ',', Errc::invalid,
                "malformed sample row: " + line);
        validate_sample(s, raster_width, raster_height);
        out.push_back(s);
    }
    return out;
}

void save_samples(const std::vector<PointSample>& samples, const std::string& path) {
    std::ofstream f(path);
    require(static_cast<bool>(f), Errc::io, "cannot open sample CSV for writing: " + path);
    f << "row,col,class_id\n";
    for (const PointSample& s : samples) f << s.row << "," << s.col << "," << s.class_id << "\n";
    require(static_cast<bool>(f), Errc::io, "write failed: " + path);
}

DatasetSplit split_samples(const std::vector<PointSample>& samples, std::uint64_t seed) {
    std::array<std::vector<PointSample>, kClassCount> by_class;
    for (const PointSample& s : samples) {
        require(s.class_id >= 0 && s.class_id < kClassCount, Errc::invalid, "class id out of range");
        by_class[s.class_id].push_back(s);
    }
    for (int k = 0; k < kClassCount; ++k)
        require(by_class[k].empty() || by_class[k].size() >= 3, Errc::invalid,
                "class " + std::to_string(k) + " has fewer than 3 samples");

    DatasetSplit out;
    out.seed = seed;
    Rng rng(seed);
    for (int k = 0; k < kClassCount; ++k) {
        auto& group = by_class[k];
        if (group.empty()) continue;
        rng.shuffle(group);
        std::size_t n = group.size();
        std::size_t c1 = static_cast<std::size_t>(std::lround(n * 0.5));
        std::size_t c2 = static_cast<std::size_t>(std::lround(n * 0.7));
        for (std::size_t i = 0; i < n; ++i) {
            if (i < c1) out.train.push_back(group[i]);
            else if (i < c2) out.val.push_back(group[i]);
            else out.test.push_back(group[i]);
        }
    }
    return out;
}

namespace {

const char* set_name(SplitSet s) {
    switch (s) {
        case SplitSet::train: return "train";
        case SplitSet::val: return "val";
        default: return "test";
    }
}

} // namespace

void save_split_csv(const DatasetSplit& split, const std::string& path) {
    std::ofstream f(path);
    require(static_cast<bool>(f), Errc::io, "cannot open split CSV for writing: " + path);
    f << "row,col,class_id,set\n";
    auto dump = [&](const std::vector<PointSample>& v, SplitSet s) {
        for (const PointSample& p : v)
            f << p.row << "," << p.col << "," << p.class_id << "," << set_name(s) << "\n";
    };
    dump(split.train, SplitSet::train);
    dump(split.val, SplitSet::val);
    dump(split.test, SplitSet::test);
    require(static_cast<bool>(f), Errc::io, "write failed: " + path);
}

DatasetSplit load_split_csv(const std::string& path, int raster_width, int raster_height) {
    std::ifstream f(path);
    require(static_cast<bool>(f), Errc::io, "cannot open split CSV: " + path);

    DatasetSplit out;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;
        }
        std::istringstream ss(line);
        PointSample s;
        char c1, c2, c3;
        std::string set;
        ss >> s.row >> c1 >> s.col >> c2 >> s.class_id >> c3 >> set;
        require(static_cast<bool>(ss) && c1 == ',' && c2 == ',' && c3 == ',', Errc::invalid,
                "malformed split row: " + line);
        validate_sample(s, raster_width, raster_height);
        if (set == "train") out.train.push_back(s);
        else if (set == "val") out.val.push_back(s);
        else if (set == "test") out.test.push_back(s);
        else fail(Errc::invalid, "unknown split set: " + set);
    }
    return out;
}

Patch extract_patch(const RasterStack& stack, const PointSample& sample) {
    require(stack.bands == kPatchBands, Errc::invalid,
            "patch extraction expects a " + std::to_string(kPatchBands) + "-band stack");
    validate_sample(sample, stack.width, stack.height);

    Patch p;
    p.values = Tensor3(kPatchSide, kPatchSide, kPatchBands);
    p.label = sample.class_id;
    p.row = sample.row;
    p.col = sample.col;
    for (int i = 0; i < kPatchSide; ++i)
        for (int j = 0; j < kPatchSide; ++j)
            for (int b = 0; b < kPatchBands; ++b)
                p.values.at(i, j, b) = stack.at(sample.row - kPatchRadius + i,
                                                sample.col - kPatchRadius + j, b);
    return p;
}

std::vector<Patch> extract_patches(const RasterStack& stack, const std::vector<PointSample>& samples) {
    std::vector<Patch> out;
    out.reserve(samples.size());
    for (const PointSample& s : samples) out.push_back(extract_patch(stack, s));
    return out;
}

Patch rot90(const Patch& p) {
    const int n = kPatchSide;
    Patch out = p;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int b = 0; b < kPatchBands; ++b)
                out.values.at(i, j, b) = p.values.at(j, n - 1 - i, b);
    return out;
}

std::vector<Patch> augment(const std::vector<Patch>& patches) {
    std::vector<Patch> out;
    out.reserve(patches.size() * 4);
    for (const Patch& p : patches) {
        out.push_back(p);
        Patch r1 = rot90(p);
        Patch r2 = rot90(r1);
        Patch r3 = rot90(r2);
        out.push_back(std::move(r1));
        out.push_back(std::move(r2));
        out.push_back(std::move(r3));
    }
    return out;
}

namespace {
constexpr char kPatchMagic[8] = {'L', 'C', 'Z', 'P', 'A', 'T', 'C', 'H'};
}

void save_patches(const std::vector<Patch>& patches, const std::string& path) {
    BinWriter w(path);
    w.bytes(kPatchMagic, 8);
    w.u32(1); // version
    w.u32(static_cast<std::uint32_t>(patches.size()));
    w.u32(kPatchSide);
    w.u32(kPatchBands);
    for (const Patch& p : patches) {
        require(p.values.rows == kPatchSide && p.values.cols == kPatchSide &&
                    p.values.channels == kPatchBands,
                Errc::invalid, "patch has wrong dims");
        w.u32(static_cast<std::uint32_t>(p.label));
        w.i32(p.row);
        w.i32(p.col);
        w.f32_array(p.values.v.data(), p.values.v.size());
    }
}

std::vector<Patch> load_patches(const std::string& path) {
    BinReader r(path);
    char magic[8];
    r.bytes(magic, 8);
    require(std::equal(magic, magic + 8, kPatchMagic), Errc::unsupported,
            "not a patch-set file: " + path);
    std::uint32_t version = r.u32();
    require(version == 1, Errc::unsupported, "unsupported patch-set version");
    std::uint32_t count = r.u32();
    std::uint32_t side = r.u32();
    std::uint32_t bands = r.u32();
    require(side == kPatchSide && bands == kPatchBands, Errc::invalid,
            "patch-set dims mismatch");

    std::vector<Patch> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Patch p;
        p.label = static_cast<int>(r.u32());
        require(p.label >= 0 && p.label < kClassCount, Errc::invalid, "patch label out of range");
        p.row = r.i32();
        p.col = r.i32();
        p.values = Tensor3(kPatchSide, kPatchSide, kPatchBands);
        r.f32_array(p.values.v.data(), p.values.v.size());
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace lcz
