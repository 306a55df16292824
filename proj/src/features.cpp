#include "simgap/features.hpp"

#include <cmath>

namespace simgap {

Eigen::MatrixXd db_feature(const CoefficientMatrix& coeffs, double t_s) {
    if (t_s <= 0) throw Error(ErrKind::InvalidRange, "dynamic range t_s must be positive");
    if (coeffs.kind != CoefficientMatrix::Kind::Plain)
        throw Error(ErrKind::ParamMismatch, "db_feature expects a plain STFT");

    const Eigen::Index R = coeffs.rows.rows();
    const Eigen::Index N = coeffs.rows.cols();
    Eigen::MatrixXd out(R, N);

    constexpr double kLogFloor = 1e-10;
    double peak_db = -std::numeric_limits<double>::infinity();
    double peak_mag = 0.0;
    for (Eigen::Index n = 0; n < N; ++n) {
        for (Eigen::Index m = 0; m < R; ++m) {
            const double mag = std::abs(coeffs.rows(m, n));
            peak_mag = std::max(peak_mag, mag);
            const double db = 20.0 * std::log10(std::max(mag, kLogFloor));
            out(m, n) = db;
            peak_db = std::max(peak_db, db);
        }
    }
    if (peak_mag == 0.0) return Eigen::MatrixXd::Zero(R, N);  // silence carries no peak

    for (Eigen::Index n = 0; n < N; ++n)
        for (Eigen::Index m = 0; m < R; ++m) {
            const double v = out(m, n) - peak_db + t_s;
            out(m, n) = v > 0.0 ? v / t_s : 0.0;
        }
    return out;
}

Eigen::VectorXd smoothing_kernel(int v_len) {
    if (v_len < 1) throw Error(ErrKind::InvalidRange, "kernel length must be >= 1");
    Eigen::VectorXd k(v_len);
    if (v_len == 1) {
        k(0) = 1.0;
        return k;
    }
    for (int j = 0; j < v_len; ++j)
        k(j) = 0.5 - 0.5 * std::cos(2.0 * M_PI * j / (v_len - 1));
    const double s = k.sum();
    if (s > 0) k /= s;
    return k;
}

Eigen::MatrixXd relative_if_feature(const CoefficientMatrix& coeffs,
                                    const CoefficientMatrix& coeffs_td,
                                    const Eigen::MatrixXd& f1, int v_len) {
    if (coeffs.rows.rows() != coeffs_td.rows.rows() || coeffs.rows.cols() != coeffs_td.rows.cols())
        throw Error(ErrKind::DimensionMismatch, "plain and derivative STFTs differ in shape");
    if (f1.rows() != coeffs.rows.rows() || f1.cols() != coeffs.rows.cols())
        throw Error(ErrKind::DimensionMismatch, "F1 does not match the coefficient matrix");
    if (v_len < 1) throw Error(ErrKind::InvalidRange, "kernel length must be >= 1");

    const Eigen::Index R = coeffs.rows.rows();
    const Eigen::Index N = coeffs.rows.cols();

    // Raw relative IF, masked where the clipped spectrogram is zero (the ratio
    // is unstable at small magnitudes).
    Eigen::MatrixXd r(R, N);
    double t_p = 0.0;
    for (Eigen::Index n = 0; n < N; ++n) {
        for (Eigen::Index m = 0; m < R; ++m) {
            if (f1(m, n) > 0.0) {
                const double v = (coeffs_td.rows(m, n) / coeffs.rows(m, n)).imag();
                r(m, n) = v;
                t_p = std::max(t_p, std::abs(v));
            } else {
                r(m, n) = 0.0;
            }
        }
    }
    if (t_p == 0.0) return Eigen::MatrixXd::Zero(R, N);

    // Channel-wise same-size zero-padded convolution with the Hann kernel.
    const Eigen::VectorXd ker = smoothing_kernel(v_len);
    const int off = (v_len - 1) / 2;
    Eigen::MatrixXd out(R, N);
    Eigen::VectorXd row(N);
    for (Eigen::Index m = 0; m < R; ++m) {
        for (Eigen::Index n = 0; n < N; ++n) {
            double acc = 0.0;
            for (int j = 0; j < v_len; ++j) {
                const Eigen::Index src = n + off - j;
                if (src >= 0 && src < N) acc += ker(j) * r(m, src);
            }
            row(n) = acc;
        }
        out.row(m) = -row.transpose() / t_p;
    }
    return out;
}

FeatureMatrix assemble(const Eigen::MatrixXd& f1, const Eigen::MatrixXd& f2, double lambda,
                       double frame_rate, int channels) {
    if (f1.rows() != f2.rows() || f1.cols() != f2.cols())
        throw Error(ErrKind::DimensionMismatch, "F1 and F2 differ in shape");

    FeatureMatrix fm;
    fm.f1 = f1;
    fm.f2_scaled = lambda * f2;
    fm.lambda = lambda;
    fm.frame_rate = frame_rate;
    fm.channels = channels;
    fm.valid.assign(static_cast<std::size_t>(f1.cols()), 1);

    const Eigen::Index R = f1.rows();
    const Eigen::Index N = f1.cols();

    // Row-weighted sparse copy: scaling one side of the inner product by the
    // mirror weights makes <x,y>_w come out of a plain product.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(R * N / 4));
    for (Eigen::Index n = 0; n < N; ++n) {
        for (Eigen::Index m = 0; m < R; ++m) {
            const double w = fm.row_weight(static_cast<int>(m));
            if (f1(m, n) != 0.0) trips.emplace_back(m, n, w * f1(m, n));
            if (fm.f2_scaled(m, n) != 0.0) trips.emplace_back(R + m, n, w * fm.f2_scaled(m, n));
        }
    }
    fm.weighted.resize(2 * R, N);
    fm.weighted.setFromTriplets(trips.begin(), trips.end());
    fm.weighted.makeCompressed();

    fm.sq_norms.resize(N);
    for (Eigen::Index n = 0; n < N; ++n) {
        double acc = 0.0;
        for (Eigen::Index m = 0; m < R; ++m) {
            const double w = fm.row_weight(static_cast<int>(m));
            acc += w * f1(m, n) * f1(m, n) + w * fm.f2_scaled(m, n) * fm.f2_scaled(m, n);
        }
        fm.sq_norms(n) = acc;
    }
    return fm;
}

Eigen::Index FeatureMatrix::valid_count() const {
    Eigen::Index c = 0;
    for (char v : valid) c += v ? 1 : 0;
    return c;
}

Eigen::VectorXd FeatureMatrix::stored_column(Eigen::Index n) const {
    const Eigen::Index R = f1.rows();
    Eigen::VectorXd col(2 * R);
    col.head(R) = f1.col(n);
    col.tail(R) = f2_scaled.col(n);
    return col;
}

Eigen::VectorXd FeatureMatrix::full_column(Eigen::Index n) const {
    const int M = channels;
    Eigen::VectorXd col(2 * M);
    for (int m = 0; m < M; ++m) {
        const int src = m <= M / 2 ? m : M - m;
        const double sign = m <= M / 2 ? 1.0 : -1.0;  // F2 mirrors with a sign flip
        col(m) = f1(src, n);
        col(M + m) = sign * f2_scaled(src, n);
    }
    return col;
}

double FeatureMatrix::squared_distance(Eigen::Index l, Eigen::Index k) const {
    const Eigen::Index R = f1.rows();
    double acc = 0.0;
    for (Eigen::Index m = 0; m < R; ++m) {
        const double w = row_weight(static_cast<int>(m));
        const double d1 = f1(m, l) - f1(m, k);
        const double d2 = f2_scaled(m, l) - f2_scaled(m, k);
        acc += w * (d1 * d1 + d2 * d2);
    }
    return acc;
}

void invalidate_gap(FeatureMatrix& fm, const GapSpec& gap, std::int64_t hop,
                    std::int64_t half_window, std::int64_t signal_length) {
    gap.check_within(signal_length);
    const Eigen::Index N = fm.frames();
    for (Eigen::Index n = 0; n < N; ++n) {
        const std::int64_t center = static_cast<std::int64_t>(n) * hop;
        // closed window support [center-half, center+half] vs gap [start, end)
        if (center + half_window >= gap.start_sample && center - half_window <= gap.end_sample - 1) {
            fm.valid[static_cast<std::size_t>(n)] = 0;
            // invalid frames carry f_n = 0; they are also excluded from
            // queries, candidacy and sigma, so the stale kNN copy is inert
            fm.f1.col(n).setZero();
            fm.f2_scaled.col(n).setZero();
        }
    }
}

}  // namespace simgap
