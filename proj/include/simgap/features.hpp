#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "simgap/audio.hpp"
#include "simgap/stft.hpp"

namespace simgap {

/// Per-frame feature vectors f_n = (F1_col_n, lambda * F2_col_n) of the
/// decimated signal, with a validity mask over frames.
///
/// Both sub-features come from the STFT of a real signal, so only the
/// channels/2+1 non-redundant rows are stored: row m of the full M-row F1
/// mirrors row M-m, and the full F2 mirrors with a sign flip. Distances over
/// the full 2M-dimensional vectors are recovered exactly by weighting the
/// interior rows twice (see row_weights); exports and column accessors expand
/// the mirror rows.
struct FeatureMatrix {
    Eigen::MatrixXd f1;         // (M/2+1) x N, entries in [0,1]
    Eigen::MatrixXd f2_scaled;  // (M/2+1) x N, lambda * F2, entries in [-lambda, lambda]
    std::vector<char> valid;    // per-frame validity (gap frames false)
    double lambda = 1.5;
    double frame_rate = 0.0;  // frames per second of original-signal time
    int channels = 0;         // full M

    // kNN support, built once in assemble(): row-weighted sparse copy of the
    // stacked features and per-frame weighted squared norms.
    Eigen::SparseMatrix<double> weighted;  // (2*(M/2+1)) x N
    Eigen::VectorXd sq_norms;              // N

    Eigen::Index frames() const { return f1.cols(); }
    int stored_rows() const { return static_cast<int>(f1.rows()); }
    Eigen::Index valid_count() const;

    // Weight of stored row m in squared distances (1 for DC/Nyquist, 2 inside).
    double row_weight(int m) const { return (m == 0 || m == stored_rows() - 1) ? 1.0 : 2.0; }

    // Stacked stored column (2*(M/2+1)), used for distance evaluation.
    Eigen::VectorXd stored_column(Eigen::Index n) const;
    // Full 2M-dimensional feature vector f_n with mirror rows expanded.
    Eigen::VectorXd full_column(Eigen::Index n) const;
    // Exact squared distance ||f_l - f_k||^2 over the full 2M dimensions.
    double squared_distance(Eigen::Index l, Eigen::Index k) const;
};

/// Peak-normalized, range-clipped dB spectrogram:
/// F1 = ((20 log10 |C|) - peak + t_s)_+ / t_s. Zero magnitudes are floored at
/// 1e-10 before the log; an all-zero signal yields an all-zero F1.
Eigen::MatrixXd db_feature(const CoefficientMatrix& coeffs, double t_s);

/// Smoothed relative instantaneous frequency: r = Im(C_td/C) where F1 > 0
/// (0 elsewhere), rows convolved with a unit-sum Hann kernel of v_len points,
/// then F2 = -r_smoothed / max|r| (max taken before smoothing).
Eigen::MatrixXd relative_if_feature(const CoefficientMatrix& coeffs,
                                    const CoefficientMatrix& coeffs_td,
                                    const Eigen::MatrixXd& f1, int v_len);

/// Stack F1 over lambda*F2 and precompute the kNN support structures.
FeatureMatrix assemble(const Eigen::MatrixXd& f1, const Eigen::MatrixXd& f2, double lambda,
                       double frame_rate, int channels);

/// Mark invalid every frame whose analysis window support
/// [n*hop - half_window, n*hop + half_window] (undecimated samples) meets the gap.
void invalidate_gap(FeatureMatrix& fm, const GapSpec& gap, std::int64_t hop,
                    std::int64_t half_window, std::int64_t signal_length);

/// Unit-sum symmetric Hann kernel of v_len points (endpoints zero).
Eigen::VectorXd smoothing_kernel(int v_len);

}  // namespace simgap
