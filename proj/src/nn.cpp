#include "lczmap/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

namespace lcz {

namespace {

/// Adam (or plain SGD) over a fixed list of parameter tensors.
class Optim {
public:
    Optim(const std::vector<std::vector<float>*>& params, const TrainConfig& cfg) : cfg_(cfg) {
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
            for (std::size_t i = 0; i < params.size(); ++i) {
                auto& p = *params[i];
                const auto& g = *grads[i];
                for (std::size_t j = 0; j < p.size(); ++j) p[j] -= lr * g[j];
            }
            return;
        }
        ++t_;
        const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        const double bc1 = 1.0 - std::pow(b1, t_);
        const double bc2 = 1.0 - std::pow(b2, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& p = *params[i];
            const auto& g = *grads[i];
            auto& m = m_[i];
            auto& v = v_[i];
            for (std::size_t j = 0; j < p.size(); ++j) {
                m[j] = static_cast<float>(b1 * m[j] + (1.0 - b1) * g[j]);
                v[j] = static_cast<float>(b2 * v[j] + (1.0 - b2) * static_cast<double>(g[j]) * g[j]);
                const double mhat = m[j] / bc1;
                const double vhat = v[j] / bc2;
                p[j] -= static_cast<float>(lr * mhat / (std::sqrt(vhat) + eps));
            }
        }
    }

private:
    TrainConfig cfg_;
    long t_ = 0;
    std::vector<std::vector<float>> m_, v_;
};

/// Per-sample gradients are computed into private buffers (possibly in
/// parallel) and reduced in sample order, so the result is bit-identical
/// for any worker count.
double batch_gradients(const CnnModel& model, const std::vector<Patch>& data,
                       const std::vector<std::size_t>& order, std::size_t begin, std::size_t end,
                       bool dropout, const std::vector<std::uint64_t>& sample_seeds, int threads,
                       std::vector<CnnGradients<float>>& slots, CnnGradients<float>& out) {
    const std::size_t n = end - begin;
    std::vector<float> losses(n, 0.0f);

    auto worker = [&](std::size_t lo, std::size_t hi) {
        CnnWork<float> w;
        for (std::size_t s = lo; s < hi; ++s) {
            const Patch& p = data[order[begin + s]];
            Rng rng(sample_seeds[s]);
            slots[s].zero();
            losses[s] = cnn_sample_backprop(model, p.values, p.label, dropout,
                                            dropout ? &rng : nullptr, w, slots[s]);
        }
    };

    int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (nthreads == 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (n + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    out.zero();
    auto dst = out.params();
    const float inv = 1.0f / static_cast<float>(n);
    for (std::size_t s = 0; s < n; ++s) {
        auto src = slots[s].params();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            auto& d = *dst[i];
            const auto& a = *src[i];
            for (std::size_t j = 0; j < d.size(); ++j) d[j] += a[j];
        }
    }
    for (auto* p : dst)
        for (float& v : *p) v *= inv;

    double total = 0.0;
    for (float l : losses) total += l;
    return total / static_cast<double>(n);
}

double eval_accuracy(const CnnModel& model, const std::vector<Patch>& patches, int threads) {
    if (patches.empty()) return 0.0;
    std::vector<std::uint8_t> hit(patches.size(), 0);
    auto worker = [&](std::size_t lo, std::size_t hi) {
        CnnWork<float> w;
        for (std::size_t i = lo; i < hi; ++i) {
            cnn_forward(model, patches[i].values, false, nullptr, w);
            int best = 0;
            for (int c = 1; c < kClassCount; ++c)
                if (w.probs[c] > w.probs[best]) best = c;
            hit[i] = best == patches[i].label ? 1 : 0;
        }
    };
    int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(patches.size())));
    if (nthreads == 1) {
        worker(0, patches.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (patches.size() + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            std::size_t lo = t * chunk, hi = std::min(patches.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    std::size_t correct = std::accumulate(hit.begin(), hit.end(), std::size_t(0));
    return static_cast<double>(correct) / static_cast<double>(patches.size());
}

} // namespace

TrainHistory train_cnn(CnnModel& model, const std::vector<Patch>& train,
                       const std::vector<Patch>& val, const TrainConfig& cfg) {
    cfg.validate();
    require(!train.empty(), Errc::invalid, "training set is empty");

    Rng master(cfg.seed);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    auto params = model_params(model);
    Optim opt(params, cfg);
    CnnGradients<float> grads = CnnGradients<float>::like(model);
    std::vector<CnnGradients<float>> slots(cfg.batch, CnnGradients<float>::like(model));
    std::vector<std::uint64_t> sample_seeds(cfg.batch);

    TrainHistory history;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        master.shuffle(order);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch) {
            std::size_t end = std::min(order.size(), begin + cfg.batch);
            // Seeds are drawn serially in sample order: parallel workers
            // replay exactly the stream a single-threaded run would use.
            for (std::size_t s = 0; s < end - begin; ++s) sample_seeds[s] = master.next_u64();
            double loss = batch_gradients(model, train, order, begin, end, cfg.dropout,
                                          sample_seeds, cfg.threads, slots, grads);
            require(std::isfinite(loss), Errc::numeric, "training diverged: non-finite loss");
            auto gparams = grads.params();
            opt.step(params, gparams);
            loss_sum += loss;
            ++batches;
        }
        EpochStats st;
        st.epoch = epoch + 1;
        st.train_loss = loss_sum / static_cast<double>(batches);
        st.val_accuracy = eval_accuracy(model, val, cfg.threads);
        history.push_back(st);
    }
    return history;
}

std::pair<int, std::array<double, kClassCount>> predict_logits(const std::vector<float>& logits) {
    require(logits.size() == kClassCount, Errc::invalid, "expected 14 logits");
    // Final softmax in double: probabilities sum to 1 within 1e-12.
    double mx = logits[0];
    for (float v : logits) mx = std::max(mx, static_cast<double>(v));
    std::array<double, kClassCount> probs{};
    double sum = 0.0;
    for (int c = 0; c < kClassCount; ++c) {
        probs[c] = std::exp(static_cast<double>(logits[c]) - mx);
        sum += probs[c];
    }
    int best = 0;
    for (int c = 0; c < kClassCount; ++c) {
        probs[c] /= sum;
        if (probs[c] > probs[best]) best = c; // strict: ties keep the lowest id
    }
    return {best, probs};
}

std::pair<int, std::array<double, kClassCount>> predict_patch(const CnnModel& model, const Patch& patch) {
    CnnWork<float> w;
    cnn_forward(model, patch.values, false, nullptr, w);
    return predict_logits(w.logits);
}

void save_history_csv(const TrainHistory& h, const std::string& path) {
    std::ofstream f(path);
    require(static_cast<bool>(f), Errc::io, "cannot open history CSV for writing: " + path);
    f << "epoch,train_loss,val_accuracy\n";
    for (const EpochStats& e : h) f << e.epoch << "," << e.train_loss << "," << e.val_accuracy << "\n";
    require(static_cast<bool>(f), Errc::io, "write failed: " + path);
}

} // namespace lcz
