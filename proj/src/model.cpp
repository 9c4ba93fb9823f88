#include "lczmap/model.hpp"

#include <algorithm>

#include "lczmap/binio.hpp"

namespace lcz {

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::cnn: return "cnn";
        case ModelKind::ann: return "ann";
        case ModelKind::rf: return "rf";
        default: return "svm";
    }
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "cnn") return ModelKind::cnn;
    if (name == "ann") return ModelKind::ann;
    if (name == "rf") return ModelKind::rf;
    if (name == "svm") return ModelKind::svm;
    fail(Errc::invalid, "unknown model kind: " + name);
}

namespace {

constexpr char kModelMagic[8] = {'L', 'C', 'Z', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kModelVersion = 1;

void write_cnn(BinWriter& w, const CnnModel& m) {
    w.u32(static_cast<std::uint32_t>(m.k));
    CnnModel& mm = const_cast<CnnModel&>(m);
    for (const auto* p : model_params(mm)) w.f32_array(p->data(), p->size());
}

CnnModel read_cnn(BinReader& r) {
    const int k = static_cast<int>(r.u32());
    CnnModel m = build_model<float>(k, 0);
    for (auto* p : model_params(m)) r.f32_array(p->data(), p->size());
    return m;
}

void write_ann(BinWriter& w, const AnnModel& m) {
    for (const auto* p : {&m.fc1.w, &m.fc1.b, &m.fc2.w, &m.fc2.b, &m.fc3.w, &m.fc3.b})
        w.f32_array(p->data(), p->size());
}

AnnModel read_ann(BinReader& r) {
    AnnModel m = build_ann(0);
    for (auto* p : {&m.fc1.w, &m.fc1.b, &m.fc2.w, &m.fc2.b, &m.fc3.w, &m.fc3.b})
        r.f32_array(p->data(), p->size());
    return m;
}

void write_forest(BinWriter& w, const Forest& f) {
    w.u32(static_cast<std::uint32_t>(f.trees.size()));
    for (const Tree& t : f.trees) {
        w.u32(static_cast<std::uint32_t>(t.nodes.size()));
        for (const TreeNode& n : t.nodes) {
            w.i32(n.feature);
            w.f32(n.threshold);
            w.i32(n.left);
            w.i32(n.right);
            for (std::uint32_t c : n.counts) w.u32(c);
        }
    }
}

Forest read_forest(BinReader& r) {
    Forest f;
    const std::uint32_t trees = r.u32();
    require(trees >= 1, Errc::invalid, "forest file has no trees");
    f.trees.resize(trees);
    for (Tree& t : f.trees) {
        const std::uint32_t nodes = r.u32();
        require(nodes >= 1, Errc::invalid, "tree file has no nodes");
        t.nodes.resize(nodes);
        for (TreeNode& n : t.nodes) {
            n.feature = r.i32();
            n.threshold = r.f32();
            n.left = r.i32();
            n.right = r.i32();
            for (std::uint32_t& c : n.counts) c = r.u32();
            require(n.feature < kPatchBands, Errc::invalid, "tree node feature out of range");
            if (n.feature >= 0)
                require(n.left >= 0 && n.left < static_cast<std::int32_t>(nodes) && n.right >= 0 &&
                            n.right < static_cast<std::int32_t>(nodes),
                        Errc::invalid, "tree child index out of range");
        }
    }
    return f;
}

void write_svm(BinWriter& w, const LinearSvmOvr& s) {
    for (const auto& wk : s.w) w.f32_array(wk.data(), wk.size());
    w.f32_array(s.b.data(), s.b.size());
}

LinearSvmOvr read_svm(BinReader& r) {
    LinearSvmOvr s{};
    for (auto& wk : s.w) r.f32_array(wk.data(), wk.size());
    r.f32_array(s.b.data(), s.b.size());
    return s;
}

} // namespace

void save_model(const Model& model, const std::string& path) {
    BinWriter w(path);
    w.bytes(kModelMagic, 8);
    w.u32(kModelVersion);
    w.u32(static_cast<std::uint32_t>(model.kind()));
    switch (model.kind()) {
        case ModelKind::cnn: write_cnn(w, std::get<CnnModel>(model.impl)); break;
        case ModelKind::ann: write_ann(w, std::get<AnnModel>(model.impl)); break;
        case ModelKind::rf: write_forest(w, std::get<Forest>(model.impl)); break;
        case ModelKind::svm: write_svm(w, std::get<LinearSvmOvr>(model.impl)); break;
    }
}

Model load_model(const std::string& path) {
    BinReader r(path);
    char magic[8];
    r.bytes(magic, 8);
    require(std::equal(magic, magic + 8, kModelMagic), Errc::unsupported,
            "not a model file: " + path);
    const std::uint32_t version = r.u32();
    require(version == kModelVersion, Errc::unsupported, "unsupported model version");
    const std::uint32_t kind = r.u32();
    Model m;
    switch (kind) {
        case 0: m.impl = read_cnn(r); break;
        case 1: m.impl = read_ann(r); break;
        case 2: m.impl = read_forest(r); break;
        case 3: m.impl = read_svm(r); break;
        default: fail(Errc::unsupported, "unknown model kind tag in file");
    }
    return m;
}

} // namespace lcz
