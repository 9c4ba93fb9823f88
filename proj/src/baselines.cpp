#include "lczmap/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace lcz {

std::vector<PixelRow> patch_to_rows(const Patch& patch) {
    require(patch.values.rows == kPatchSide && patch.values.cols == kPatchSide &&
                patch.values.channels == kPatchBands,
            Errc::invalid, "patch has wrong dims");
    std::vector<PixelRow> rows;
    rows.reserve(kPatchSide * kPatchSide);
    for (int i = 0; i < kPatchSide; ++i)
        for (int j = 0; j < kPatchSide; ++j) {
            PixelRow r;
            for (int b = 0; b < kPatchBands; ++b) r.features[b] = patch.values.at(i, j, b);
            r.label = patch.label;
            rows.push_back(r);
        }
    return rows;
}

std::vector<PixelRow> patches_to_rows(const std::vector<Patch>& patches) {
    std::vector<PixelRow> rows;
    rows.reserve(patches.size() * kPatchSide * kPatchSide);
    for (const Patch& p : patches) {
        auto pr = patch_to_rows(p);
        rows.insert(rows.end(), pr.begin(), pr.end());
    }
    return rows;
}

// --------------------------------------------------------------------------
// ANN

AnnModel build_ann(std::uint64_t seed) {
    AnnModel m;
    m.fc1.resize(20, kPatchBands);
    m.fc2.resize(20, 20);
    m.fc3.resize(kClassCount, 20);
    Rng rng(seed);
    auto he_fill = [&rng](std::vector<float>& w, int fan_in) {
        const double s = std::sqrt(2.0 / fan_in);
        for (float& v : w) v = static_cast<float>(s * rng.next_normal());
    };
    he_fill(m.fc1.w, kPatchBands);
    he_fill(m.fc2.w, 20);
    he_fill(m.fc3.w, 20);
    return m;
}

namespace {

constexpr double kAnnDropout = 0.5;

struct AnnWork {
    std::vector<float> x, z1, a1, z2, a2, logits, probs;
    std::vector<std::uint8_t> mask1, mask2;
};

void ann_forward(const AnnModel& m, const std::array<float, kPatchBands>& features,
                 bool train_dropout, Rng* rng, AnnWork& w) {
    w.x.assign(features.begin(), features.end());
    w.z1 = dense_forward(w.x, m.fc1);
    w.a1 = w.z1;
    for (float& v : w.a1) v = v > 0.0f ? v : 0.0f;
    dropout_forward(w.a1, kAnnDropout, train_dropout, rng, &w.mask1);
    w.z2 = dense_forward(w.a1, m.fc2);
    w.a2 = w.z2;
    for (float& v : w.a2) v = v > 0.0f ? v : 0.0f;
    dropout_forward(w.a2, kAnnDropout, train_dropout, rng, &w.mask2);
    w.logits = dense_forward(w.a2, m.fc3);
    w.probs = softmax(w.logits);
}

struct AnnGrads {
    DenseLayerT<float> fc1, fc2, fc3;
    static AnnGrads like(const AnnModel&) {
        AnnGrads g;
        g.fc1.resize(20, kPatchBands);
        g.fc2.resize(20, 20);
        g.fc3.resize(kClassCount, 20);
        return g;
    }
    void zero() {
        fc1.zero();
        fc2.zero();
        fc3.zero();
    }
    std::vector<std::vector<float>*> params() {
        return {&fc1.w, &fc1.b, &fc2.w, &fc2.b, &fc3.w, &fc3.b};
    }
};

float ann_sample_backprop(const AnnModel& m, const PixelRow& row, bool train_dropout, Rng* rng,
                          AnnWork& w, AnnGrads& g) {
    ann_forward(m, row.features, train_dropout, rng, w);
    float loss = -std::log(w.probs[row.label]);

    std::vector<float> dlogits = w.probs;
    dlogits[row.label] -= 1.0f;

    std::vector<float> da2;
    dense_backward(w.a2, m.fc3, dlogits, g.fc3, &da2);
    if (train_dropout) dropout_backward(da2, kAnnDropout, w.mask2);
    for (std::size_t i = 0; i < da2.size(); ++i)
        if (w.z2[i] <= 0.0f) da2[i] = 0.0f;

    std::vector<float> da1;
    dense_backward(w.a1, m.fc2, da2, g.fc2, &da1);
    if (train_dropout) dropout_backward(da1, kAnnDropout, w.mask1);
    for (std::size_t i = 0; i < da1.size(); ++i)
        if (w.z1[i] <= 0.0f) da1[i] = 0.0f;

    dense_backward(w.x, m.fc1, da1, g.fc1, nullptr);
    return loss;
}

/// Same Adam as the CNN trainer (nn.cpp keeps its own copy private).
class AnnOptim {
public:
    AnnOptim(const std::vector<std::vector<float>*>& params, const TrainConfig& cfg) : cfg_(cfg) {
        if (cfg.optimizer == Optimizer::adam) {
            m_.resize(params.size());
            v_.resize(params.size());
            for (std::size_t i = 0; i < params.size(); ++i) {
                m_[i].assign(params[i]->size(), 0.0f);
                v_[i].assign(params[i]->size(), 0.0f);
            }
        }
    }
    void step(const std::vector<std::vector<float>*>& params,
              const std::vector<std::vector<float>*>& grads) {
        const float lr = cfg_.learning_rate;
        if (cfg_.optimizer == Optimizer::sgd) {
            for (std::size_t i = 0; i < params.size(); ++i)
                for (std::size_t j = 0; j < params[i]->size(); ++j)
                    (*params[i])[j] -= lr * (*grads[i])[j];
            return;
        }
        ++t_;
        const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        const double bc1 = 1.0 - std::pow(b1, t_);
        const double bc2 = 1.0 - std::pow(b2, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& p = *params[i];
            const auto& g = *grads[i];
            for (std::size_t j = 0; j < p.size(); ++j) {
                m_[i][j] = static_cast<float>(b1 * m_[i][j] + (1.0 - b1) * g[j]);
                v_[i][j] =
                    static_cast<float>(b2 * v_[i][j] + (1.0 - b2) * static_cast<double>(g[j]) * g[j]);
                p[j] -= static_cast<float>(lr * (m_[i][j] / bc1) / (std::sqrt(v_[i][j] / bc2) + eps));
            }
        }
    }

private:
    TrainConfig cfg_;
    long t_ = 0;
    std::vector<std::vector<float>> m_, v_;
};

} // namespace

TrainHistory train_ann(AnnModel& model, const std::vector<PixelRow>& train,
                       const std::vector<PixelRow>& val, const TrainConfig& cfg) {
    cfg.validate();
    require(!train.empty(), Errc::invalid, "training rows are empty");

    std::vector<std::vector<float>*> params = {&model.fc1.w, &model.fc1.b, &model.fc2.w,
                                               &model.fc2.b, &model.fc3.w, &model.fc3.b};
    AnnOptim opt(params, cfg);
    AnnGrads grads = AnnGrads::like(model);
    AnnGrads sample = AnnGrads::like(model);
    AnnWork w;

    Rng master(cfg.seed);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    TrainHistory history;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        master.shuffle(order);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch) {
            std::size_t end = std::min(order.size(), begin + cfg.batch);
            grads.zero();
            double loss = 0.0;
            for (std::size_t s = begin; s < end; ++s) {
                Rng rng(master.next_u64());
                sample.zero();
                loss += ann_sample_backprop(model, train[order[s]], cfg.dropout,
                                            cfg.dropout ? &rng : nullptr, w, sample);
                auto gp = grads.params();
                auto sp = sample.params();
                for (std::size_t i = 0; i < gp.size(); ++i)
                    for (std::size_t j = 0; j < gp[i]->size(); ++j) (*gp[i])[j] += (*sp[i])[j];
            }
            const float inv = 1.0f / static_cast<float>(end - begin);
            auto gp = grads.params();
            for (auto* p : gp)
                for (float& v : *p) v *= inv;
            loss /= static_cast<double>(end - begin);
            require(std::isfinite(loss), Errc::numeric, "ANN training diverged: non-finite loss");
            opt.step(params, gp);
            loss_sum += loss;
            ++batches;
        }
        EpochStats st;
        st.epoch = epoch + 1;
        st.train_loss = loss_sum / static_cast<double>(batches);
        if (!val.empty()) {
            std::size_t correct = 0;
            for (const PixelRow& r : val)
                if (predict_pixel(model, r.features) == r.label) ++correct;
            st.val_accuracy = static_cast<double>(correct) / static_cast<double>(val.size());
        }
        history.push_back(st);
    }
    return history;
}

std::vector<float> ann_logits(const AnnModel& m, const std::array<float, kPatchBands>& features) {
    AnnWork w;
    ann_forward(m, features, false, nullptr, w);
    return w.logits;
}

int predict_pixel(const AnnModel& model, const std::array<float, kPatchBands>& features) {
    return predict_logits(ann_logits(model, features)).first;
}

// --------------------------------------------------------------------------
// Random forest

int Tree::predict(const std::array<float, kPatchBands>& features) const {
    int idx = 0;
    while (nodes[idx].feature >= 0)
        idx = features[nodes[idx].feature] <= nodes[idx].threshold ? nodes[idx].left
                                                                   : nodes[idx].right;
    const auto& c = nodes[idx].counts;
    int best = 0;
    for (int k = 1; k < kClassCount; ++k)
        if (c[k] > c[best]) best = k;
    return best;
}

namespace {

double gini(const std::array<std::uint64_t, kClassCount>& counts, double n) {
    double g = 1.0;
    for (std::uint64_t c : counts) {
        double p = static_cast<double>(c) / n;
        g -= p * p;
    }
    return g;
}

Tree grow_tree(const std::vector<PixelRow>& rows, std::uint64_t tree_seed) {
    Rng rng(tree_seed);
    const std::size_t n = rows.size();

    // Bootstrap resample.
    std::vector<std::uint32_t> boot(n);
    for (std::size_t i = 0; i < n; ++i) boot[i] = static_cast<std::uint32_t>(rng.next_index(n));

    Tree tree;
    tree.nodes.emplace_back();

    struct Task {
        std::int32_t node;
        std::vector<std::uint32_t> members; // indices into rows (with bootstrap multiplicity)
    };
    std::vector<Task> stack;
    stack.push_back({0, std::move(boot)});

    std::array<int, kPatchBands> feature_pool{};
    std::iota(feature_pool.begin(), feature_pool.end(), 0);

    while (!stack.empty()) {
        Task task = std::move(stack.back());
        stack.pop_back();
        TreeNode& node = tree.nodes[task.node];

        std::array<std::uint64_t, kClassCount> counts{};
        for (std::uint32_t r : task.members) ++counts[rows[r].label];
        int present = 0;
        for (std::uint64_t c : counts)
            if (c > 0) ++present;

        auto make_leaf = [&]() {
            node.feature = -1;
            for (int k = 0; k < kClassCount; ++k)
                node.counts[k] = static_cast<std::uint32_t>(counts[k]);
        };

        if (present <= 1) { // pure
            make_leaf();
            continue;
        }

        // Sample 4 distinct candidate features.
        for (int i = 0; i < kForestFeaturesPerSplit; ++i) {
            std::size_t j = i + rng.next_index(feature_pool.size() - i);
            std::swap(feature_pool[i], feature_pool[j]);
        }

        const double nn = static_cast<double>(task.members.size());
        const double parent = gini(counts, nn);
        double best_score = parent; // weighted child impurity must beat this
        int best_feature = -1;
        float best_threshold = 0.0f;

        std::vector<std::pair<float, std::uint32_t>> sorted;
        for (int fi = 0; fi < kForestFeaturesPerSplit; ++fi) {
            const int f = feature_pool[fi];
            sorted.clear();
            sorted.reserve(task.members.size());
            for (std::uint32_t r : task.members) sorted.emplace_back(rows[r].features[f], r);
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::array<std::uint64_t, kClassCount> left{};
            std::size_t nl = 0;
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                ++left[rows[sorted[i].second].label];
                ++nl;
                if (sorted[i].first == sorted[i + 1].first) continue; // no boundary
                std::array<std::uint64_t, kClassCount> right{};
                for (int k = 0; k < kClassCount; ++k) right[k] = counts[k] - left[k];
                const double nr = nn - static_cast<double>(nl);
                const double score = (static_cast<double>(nl) * gini(left, static_cast<double>(nl)) +
                                      nr * gini(right, nr)) /
                                     nn;
                if (score < best_score) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = sorted[i].first + (sorted[i + 1].first - sorted[i].first) / 2.0f;
                }
            }
        }

        if (best_feature < 0) { // candidate features all constant
            make_leaf();
            continue;
        }

        std::vector<std::uint32_t> left_members, right_members;
        for (std::uint32_t r : task.members) {
            if (rows[r].features[best_feature] <= best_threshold) left_members.push_back(r);
            else right_members.push_back(r);
        }
        if (left_members.empty() || right_members.empty()) { // threshold degenerated in float
            make_leaf();
            continue;
        }

        node.feature = best_feature;
        node.threshold = best_threshold;
        std::int32_t li = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        std::int32_t ri = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[task.node].left = li; // re-index: emplace may have moved `node`
        tree.nodes[task.node].right = ri;
        stack.push_back({ri, std::move(right_members)});
        stack.push_back({li, std::move(left_members)}); // left grown first
    }
    return tree;
}

} // namespace

Forest train_rf(const std::vector<PixelRow>& rows, int tree_count, std::uint64_t seed, int threads) {
    require(!rows.empty(), Errc::invalid, "forest training rows are empty");
    require(tree_count >= 1, Errc::invalid, "tree count must be positive");
    for (const PixelRow& r : rows)
        require(r.label >= 0 && r.label < kClassCount, Errc::invalid, "row label out of range");

    // One independent seed per tree so parallel growth reproduces the
    // serial result exactly.
    Rng master(seed);
    std::vector<std::uint64_t> tree_seeds(tree_count);
    for (int t = 0; t < tree_count; ++t) tree_seeds[t] = master.next_u64();

    Forest forest;
    forest.trees.resize(tree_count);
    int nthreads = std::max(1, std::min(threads, tree_count));
    if (nthreads == 1) {
        for (int t = 0; t < tree_count; ++t) forest.trees[t] = grow_tree(rows, tree_seeds[t]);
    } else {
        std::vector<std::thread> pool;
        int chunk = (tree_count + nthreads - 1) / nthreads;
        for (int w = 0; w < nthreads; ++w) {
            int lo = w * chunk, hi = std::min(tree_count, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi]() {
                for (int t = lo; t < hi; ++t) forest.trees[t] = grow_tree(rows, tree_seeds[t]);
            });
        }
        for (auto& th : pool) th.join();
    }
    return forest;
}

int predict_pixel(const Forest& forest, const std::array<float, kPatchBands>& features) {
    require(!forest.trees.empty(), Errc::invalid, "empty forest");
    std::array<std::uint32_t, kClassCount> votes{};
    for (const Tree& t : forest.trees) ++votes[t.predict(features)];
    int best = 0;
    for (int k = 1; k < kClassCount; ++k)
        if (votes[k] > votes[best]) best = k;
    return best;
}

// --------------------------------------------------------------------------
// Linear SVM (one-vs-rest)

LinearSvmOvr train_svm(const std::vector<PixelRow>& rows, const SvmConfig& cfg) {
    require(!rows.empty(), Errc::invalid, "SVM training rows are empty");
    require(cfg.epochs > 0 && cfg.lambda > 0.0, Errc::invalid, "bad SVM config");
    {
        std::array<bool, kClassCount> seen{};
        int distinct = 0;
        for (const PixelRow& r : rows) {
            require(r.label >= 0 && r.label < kClassCount, Errc::invalid, "row label out of range");
            if (!seen[r.label]) {
                seen[r.label] = true;
                ++distinct;
            }
        }
        require(distinct >= 2, Errc::invalid, "SVM needs at least two classes");
    }

    LinearSvmOvr svm{};
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);

    long t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t idx : order) {
            const PixelRow& r = rows[idx];
            ++t;
            const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
            const float shrink = static_cast<float>(1.0 - eta * cfg.lambda); // = 1 - 1/t
            for (int k = 0; k < kClassCount; ++k) {
                const float y = r.label == k ? 1.0f : -1.0f;
                double score = svm.b[k];
                for (int f = 0; f < kPatchBands; ++f) score += svm.w[k][f] * r.features[f];
                const double margin = y * score;
                for (int f = 0; f < kPatchBands; ++f) svm.w[k][f] *= shrink;
                if (margin < 1.0) {
                    const float step = static_cast<float>(eta) * y;
                    for (int f = 0; f < kPatchBands; ++f) svm.w[k][f] += step * r.features[f];
                    svm.b[k] += step; // bias unregularized
                }
            }
        }
    }
    return svm;
}

int predict_pixel(const LinearSvmOvr& svm, const std::array<float, kPatchBands>& features) {
    int best = 0;
    double best_score = 0.0;
    for (int k = 0; k < kClassCount; ++k) {
        double score = svm.b[k];
        for (int f = 0; f < kPatchBands; ++f) score += svm.w[k][f] * features[f];
        if (k == 0 || score > best_score) {
            best = k;
            best_score = score;
        }
    }
    return best;
}

} // namespace lcz
