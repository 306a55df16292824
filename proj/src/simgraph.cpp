#include "simgap/simgraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace simgap {

namespace {

// Bounded best-K collector ordered by (distance, index); ties favor the
// smaller frame index.
class TopK {
  public:
    explicit TopK(int k) : k_(static_cast<std::size_t>(k)) {}

    void offer(int idx, double dist) {
        const std::pair<double, int> cand{dist, idx};
        if (items_.size() == k_ && !(cand < items_.back())) return;
        items_.insert(std::lower_bound(items_.begin(), items_.end(), cand), cand);
        if (items_.size() > k_) items_.pop_back();
    }

    std::vector<std::pair<int, double>> take() const {
        std::vector<std::pair<int, double>> out;
        out.reserve(items_.size());
        for (const auto& [d, i] : items_) out.emplace_back(i, d);
        return out;
    }

  private:
    std::size_t k_;
    std::vector<std::pair<double, int>> items_;  // ascending by (dist, idx)
};

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

KnnResult knn(const FeatureMatrix& fm, int k_neighbors, const std::vector<int>& queries,
              int exclude_radius) {
    if (k_neighbors < 1) throw Error(ErrKind::InvalidArgs, "K must be >= 1");
    const Eigen::Index N = fm.frames();
    const Eigen::Index n_valid = fm.valid_count();
    if (n_valid - 1 < k_neighbors)
        throw Error(ErrKind::NotEnoughFrames,
                    "need at least K+1 valid frames (have " + std::to_string(n_valid) + ")");

    std::vector<int> q = sorted_unique(queries);
    for (int l : q) {
        if (l < 0 || l >= N) throw Error(ErrKind::OutOfBounds, "query frame out of range");
        if (!fm.valid[static_cast<std::size_t>(l)])
            throw Error(ErrKind::InvalidArgs, "query frame is not valid");
    }

    KnnResult res;
    res.queries = q;
    res.neighbors.resize(q.size());

    // Distances via ||x||^2 + ||y||^2 - 2<x,y>_w; the inner products against
    // all frames come from one dense-row-block x sparse product per query block.
    const Eigen::Index block = 128;
    const Eigen::Index dim = 2 * fm.stored_rows();
    for (std::size_t qb = 0; qb < q.size(); qb += static_cast<std::size_t>(block)) {
        const Eigen::Index bsz =
            std::min<Eigen::Index>(block, static_cast<Eigen::Index>(q.size() - qb));
        Eigen::MatrixXd qmat(bsz, dim);
        for (Eigen::Index i = 0; i < bsz; ++i)
            qmat.row(i) = fm.stored_column(q[qb + static_cast<std::size_t>(i)]).transpose();
        Eigen::MatrixXd dots = qmat * fm.weighted;  // bsz x N

        for (Eigen::Index i = 0; i < bsz; ++i) {
            const int l = q[qb + static_cast<std::size_t>(i)];
            const double nl = fm.sq_norms(l);
            TopK top(k_neighbors);
            for (Eigen::Index k = 0; k < N; ++k) {
                if (static_cast<int>(k) == l) continue;
                if (std::abs(static_cast<int>(k) - l) <= exclude_radius) continue;
                if (!fm.valid[static_cast<std::size_t>(k)]) continue;
                const double d = std::max(0.0, nl + fm.sq_norms(k) - 2.0 * dots(i, k));
                top.offer(static_cast<int>(k), d);
            }
            auto picked = top.take();
            if (static_cast<int>(picked.size()) < k_neighbors)
                throw Error(ErrKind::NotEnoughFrames,
                            "fewer than K admissible neighbors for frame " + std::to_string(l));
            res.neighbors[qb + static_cast<std::size_t>(i)] = std::move(picked);
        }
    }
    return res;
}

KnnResult knn_approx(const FeatureMatrix& fm, int k_neighbors, const std::vector<int>& queries,
                     int exclude_radius, int oversample) {
    if (oversample < 1) throw Error(ErrKind::InvalidArgs, "oversample must be >= 1");
    if (k_neighbors < 1) throw Error(ErrKind::InvalidArgs, "K must be >= 1");
    const Eigen::Index N = fm.frames();
    if (fm.valid_count() - 1 < k_neighbors)
        throw Error(ErrKind::NotEnoughFrames, "need at least K+1 valid frames");
    std::vector<int> q = sorted_unique(queries);

    // Screening pass on a strided subset of the stored rows.
    const Eigen::Index R = fm.stored_rows();
    const Eigen::Index stride = std::max<Eigen::Index>(1, R / 64);
    KnnResult res;
    res.queries = q;
    res.neighbors.resize(q.size());
    const int shortlist = k_neighbors * oversample;

    for (std::size_t qi = 0; qi < q.size(); ++qi) {
        const int l = q[qi];
        if (l < 0 || l >= N) throw Error(ErrKind::OutOfBounds, "query frame out of range");
        TopK screen(shortlist);
        for (Eigen::Index k = 0; k < N; ++k) {
            if (static_cast<int>(k) == l) continue;
            if (std::abs(static_cast<int>(k) - l) <= exclude_radius) continue;
            if (!fm.valid[static_cast<std::size_t>(k)]) continue;
            double acc = 0.0;
            for (Eigen::Index m = 0; m < R; m += stride) {
                const double d1 = fm.f1(m, l) - fm.f1(m, k);
                const double d2 = fm.f2_scaled(m, l) - fm.f2_scaled(m, k);
                acc += d1 * d1 + d2 * d2;
            }
            screen.offer(static_cast<int>(k), acc);
        }
        TopK top(k_neighbors);
        for (const auto& kv : screen.take()) top.offer(kv.first, fm.squared_distance(l, kv.first));
        auto picked = top.take();
        if (static_cast<int>(picked.size()) < k_neighbors)
            throw Error(ErrKind::NotEnoughFrames,
                        "fewer than K admissible neighbors for frame " + std::to_string(l));
        res.neighbors[qi] = std::move(picked);
    }
    return res;
}

double auto_sigma(const KnnResult& result) {
    if (result.queries.empty()) throw Error(ErrKind::InvalidArgs, "empty kNN result");
    double sum = 0.0;
    std::int64_t count = 0;
    for (const auto& nb : result.neighbors)
        for (const auto& [k, d] : nb) {
            sum += d;
            ++count;
        }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

SparseWeights build_w0(const KnnResult& result, double sigma, Eigen::Index dims) {
    if (sigma < 0) throw Error(ErrKind::InvalidArgs, "sigma must be nonnegative");
    SparseWeights w;
    w.stage = SparseWeights::Stage::W0;
    w.dims = dims;
    for (std::size_t i = 0; i < result.queries.size(); ++i) {
        const int l = result.queries[i];
        for (const auto& [k, d] : result.neighbors[i]) {
            // sigma == 0 only when all distances vanish; the kernel limit is 1.
            const double weight = sigma == 0.0 ? 1.0 : std::exp(-d / sigma);
            w.entries.push_back({l, k, weight});
        }
    }
    std::sort(w.entries.begin(), w.entries.end(), [](const auto& a, const auto& b) {
        return a.l != b.l ? a.l < b.l : a.k < b.k;
    });
    return w;
}

Eigen::VectorXd diagonal_kernel(int kernel_length) {
    if (kernel_length < 2 || kernel_length % 2 != 0)
        throw Error(ErrKind::InvalidKernelLength, "kernel length must be even and >= 2");
    Eigen::VectorXd d(kernel_length + 1);
    for (int l = 0; l <= kernel_length; ++l)
        d(l) = 1.0 - std::abs(kernel_length - 2.0 * l) / kernel_length;
    return d;
}

SparseWeights convolve_weights(const SparseWeights& w0, const Eigen::VectorXd& kernel_diag) {
    if (w0.stage != SparseWeights::Stage::W0)
        throw Error(ErrKind::ParamMismatch, "convolve_weights expects stage W0");
    const int lk = static_cast<int>(kernel_diag.size()) - 1;
    const int h = lk / 2;
    const Eigen::Index N = w0.dims;

    std::vector<SparseWeights::Entry> acc;
    acc.reserve(w0.entries.size() * static_cast<std::size_t>(2 * h - 1));
    for (const auto& e : w0.entries) {
        for (int j = -h; j <= h; ++j) {
            const double kj = kernel_diag(j + h);
            if (kj == 0.0) continue;
            const int l = e.l - j;
            const int k = e.k - j;
            if (l < 0 || l >= N || k < 0 || k >= N) continue;
            acc.push_back({l, k, e.weight * kj});
        }
    }
    std::sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) {
        return a.l != b.l ? a.l < b.l : a.k < b.k;
    });

    SparseWeights w;
    w.stage = SparseWeights::Stage::W;
    w.dims = N;
    w.restriction = w0.restriction;
    for (std::size_t i = 0; i < acc.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < acc.size() && acc[j].l == acc[i].l && acc[j].k == acc[i].k) {
            sum += acc[j].weight;
            ++j;
        }
        w.entries.push_back({acc[i].l, acc[i].k, sum});
        i = j;
    }
    return w;
}

double SparseWeights::value_at(int l, int k) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), std::pair(l, k),
                               [](const Entry& e, const std::pair<int, int>& key) {
                                   return e.l != key.first ? e.l < key.first : e.k < key.second;
                               });
    if (it != entries.end() && it->l == l && it->k == k) return it->weight;
    return 0.0;
}

SparseWeights sparsify(const SparseWeights& w, double threshold) {
    if (w.stage != SparseWeights::Stage::W)
        throw Error(ErrKind::ParamMismatch, "sparsify expects stage W");
    if (threshold <= 0) throw Error(ErrKind::InvalidArgs, "t_w must be positive");

    SparseWeights out;
    out.stage = SparseWeights::Stage::Ws;
    out.dims = w.dims;
    out.restriction = w.restriction;
    for (const auto& e : w.entries) {
        if (e.weight < threshold) continue;
        // local maximum against the four diagonal neighbors, ties kept
        if (e.weight < w.value_at(e.l - 1, e.k - 1)) continue;
        if (e.weight < w.value_at(e.l - 1, e.k + 1)) continue;
        if (e.weight < w.value_at(e.l + 1, e.k - 1)) continue;
        if (e.weight < w.value_at(e.l + 1, e.k + 1)) continue;
        out.entries.push_back(e);
    }
    return out;
}

namespace {

GraphStages graph_pipeline(const FeatureMatrix& fm, const std::vector<int>& queries,
                           const GraphParams& params, std::vector<int> restriction) {
    KnnResult nn = params.approx
                       ? knn_approx(fm, params.k_neighbors, queries, params.exclude_radius)
                       : knn(fm, params.k_neighbors, queries, params.exclude_radius);
    GraphStages st;
    st.sigma = params.sigma ? *params.sigma : auto_sigma(nn);
    st.w0 = build_w0(nn, st.sigma, fm.frames());
    st.w0.restriction = restriction;
    st.w = convolve_weights(st.w0, diagonal_kernel(params.kernel_length));
    st.ws = sparsify(st.w, params.threshold);

    if (!restriction.empty()) {
        std::vector<SparseWeights::Entry> kept;
        for (const auto& e : st.ws.entries) {
            if (!std::binary_search(st.ws.restriction.begin(), st.ws.restriction.end(), e.l))
                continue;
            if (!fm.valid[static_cast<std::size_t>(e.k)]) continue;
            kept.push_back(e);
        }
        st.ws.entries = std::move(kept);
    }
    return st;
}

}  // namespace

GraphStages reduced_graph_stages(const FeatureMatrix& fm, int d_s, int d_e,
                                 const GraphParams& params) {
    params.validate();
    const int N = static_cast<int>(fm.frames());
    const int h = params.kernel_length / 2;

    auto add_range = [&](std::vector<int>& dst, int lo, int hi) {
        lo = std::max(lo, 0);
        hi = std::min(hi, N - 1);
        for (int n = lo; n <= hi; ++n)
            if (fm.valid[static_cast<std::size_t>(n)]) dst.push_back(n);
    };

    std::vector<int> base;
    add_range(base, d_s - params.eps_before, d_s);
    add_range(base, d_e, d_e + params.eps_after);
    if (base.empty())
        throw Error(ErrKind::NoValidQueries, "no valid frames near the gap to query");

    // Dilation by L_K/2 keeps the convolution exact on the undilated set.
    std::vector<int> dilated;
    add_range(dilated, d_s - params.eps_before - h, d_s + h);
    add_range(dilated, d_e - h, d_e + params.eps_after + h);
    dilated = sorted_unique(std::move(dilated));

    return graph_pipeline(fm, dilated, params, dilated);
}

SparseWeights reduced_graph(const FeatureMatrix& fm, int d_s, int d_e, const GraphParams& params) {
    return reduced_graph_stages(fm, d_s, d_e, params).ws;
}

GraphStages full_graph_stages(const FeatureMatrix& fm, const GraphParams& params) {
    params.validate();
    std::vector<int> queries;
    for (Eigen::Index n = 0; n < fm.frames(); ++n)
        if (fm.valid[static_cast<std::size_t>(n)]) queries.push_back(static_cast<int>(n));
    if (queries.empty()) throw Error(ErrKind::NoValidQueries, "no valid frames");
    return graph_pipeline(fm, queries, params, {});
}

SparseWeights full_graph(const FeatureMatrix& fm, const GraphParams& params) {
    return full_graph_stages(fm, params).ws;
}

}  // namespace simgap
