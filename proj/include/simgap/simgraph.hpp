#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "simgap/audio.hpp"
#include "simgap/features.hpp"

namespace simgap {

struct GraphParams {
    int k_neighbors = 40;
    int kernel_length = 40;  // L_K, even
    double threshold = 2.0;  // t_w
    std::optional<double> sigma;  // fixed bandwidth; auto when empty
    int exclude_radius = 40;      // drop neighbors with |k-l| <= radius (graph pipeline)
    int eps_before = 1;           // epsilon_1, frames
    int eps_after = 1;            // epsilon_2, frames
    bool approx = false;          // screened-rescored search instead of exact

    void validate() const {
        if (k_neighbors < 1) throw Error(ErrKind::InvalidArgs, "K must be >= 1");
        if (kernel_length < 2 || kernel_length % 2 != 0)
            throw Error(ErrKind::InvalidKernelLength, "kernel length must be even and >= 2");
        if (threshold <= 0) throw Error(ErrKind::InvalidArgs, "t_w must be positive");
        if (eps_before < 0 || eps_after < 0)
            throw Error(ErrKind::InvalidArgs, "epsilon ranges must be nonnegative");
    }
};

/// Sparse weight matrix in one of the three pipeline stages.
struct SparseWeights {
    enum class Stage { W0, W, Ws };

    struct Entry {
        int l;  // row (query frame)
        int k;  // column (neighbor frame)
        double weight;
    };

    Stage stage = Stage::W0;
    Eigen::Index dims = 0;        // N (matrix is N x N)
    std::vector<Entry> entries;   // sorted by (l, k), weights > 0
    std::vector<int> restriction; // sorted query rows of the reduced variant (empty: full)

    double value_at(int l, int k) const;  // 0 when absent
};

struct KnnResult {
    std::vector<int> queries;
    // per query: (neighbor, squared distance), sorted by (distance, neighbor)
    std::vector<std::vector<std::pair<int, double>>> neighbors;
};

/// Exact K nearest valid frames per query under the full 2M-dim squared
/// distance; ties broken by the smaller frame index. Frames with
/// |k - query| <= exclude_radius are not candidates (radius 0 keeps k != l only).
KnnResult knn(const FeatureMatrix& fm, int k_neighbors, const std::vector<int>& queries,
              int exclude_radius = 0);

/// Approximate variant: candidates are pre-ranked on a strided subset of the
/// dimensions, then the best k_neighbors*oversample are rescored exactly.
KnnResult knn_approx(const FeatureMatrix& fm, int k_neighbors, const std::vector<int>& queries,
                     int exclude_radius = 0, int oversample = 8);

/// sigma = mean of all returned squared neighbor distances.
double auto_sigma(const KnnResult& result);

/// W0(l,k) = exp(-d^2/sigma) over the kNN edges; all weights 1 when sigma == 0.
SparseWeights build_w0(const KnnResult& result, double sigma, Eigen::Index dims);

/// Diagonal values (1 - |L_K - 2l|/L_K) of the (L_K+1)x(L_K+1) kernel.
Eigen::VectorXd diagonal_kernel(int kernel_length);

/// W(l,k) = sum_j (1-|2j/L_K|) W0(l+j, k+j), indices outside [0,N) read as zero.
SparseWeights convolve_weights(const SparseWeights& w0, const Eigen::VectorXd& kernel_diag);

/// Keep entries >= max(t_w, four diagonal neighbors); ties kept.
SparseWeights sparsify(const SparseWeights& w, double threshold);

/// All three pipeline stages, kept for exports.
struct GraphStages {
    SparseWeights w0, w, ws;
    double sigma = 0.0;
};

/// Full pipeline restricted to queries around the gap: the query intervals
/// [d_s-eps1, d_s] and [d_e, d_e+eps2] are dilated by L_K/2 frames so the
/// convolution is exact on the undilated set; sigma comes from the reduced
/// kNN result only. Ws entries keep rows in the dilated set and valid columns.
GraphStages reduced_graph_stages(const FeatureMatrix& fm, int d_s, int d_e,
                                 const GraphParams& params);
SparseWeights reduced_graph(const FeatureMatrix& fm, int d_s, int d_e, const GraphParams& params);

/// Same pipeline over all valid frames (no restriction).
GraphStages full_graph_stages(const FeatureMatrix& fm, const GraphParams& params);
SparseWeights full_graph(const FeatureMatrix& fm, const GraphParams& params);

}  // namespace simgap
