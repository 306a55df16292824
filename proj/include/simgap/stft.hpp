#pragma once

#include <Eigen/Dense>
#include <complex>

#include "simgap/errors.hpp"

namespace simgap {

/// Analysis grid for the painless short-time Fourier transform:
/// hop `hop`, `channels` frequency channels, window of length `win_length`.
/// Frame n is centered at sample n*hop; the window is indexed symmetrically
/// around its center (offset 0 maps to win[win_length/2]).
struct StftParams {
    int win_length = 1024;
    int hop = 128;
    int channels = 1024;
    Eigen::Index signal_length = 0;  // must be a multiple of hop

    void validate() const {
        if (win_length <= 0 || win_length % 2 != 0)
            throw Error(ErrKind::InvalidLength, "window length must be even and positive");
        if (hop <= 0) throw Error(ErrKind::ParamMismatch, "hop must be positive");
        if (channels < win_length)
            throw Error(ErrKind::ParamMismatch, "painless case requires channels >= win_length");
        if (signal_length <= 0 || signal_length % hop != 0)
            throw Error(ErrKind::ParamMismatch, "signal length must be a positive multiple of hop");
        if (signal_length < channels)
            throw Error(ErrKind::ParamMismatch, "signal shorter than one FFT block");
    }

    Eigen::Index frames() const { return signal_length / hop; }
    int spectrum_rows() const { return channels / 2 + 1; }
};

/// STFT coefficients of a real signal. Only the channels/2+1 non-redundant
/// rows are stored; entry(m,n) exposes the full-matrix semantics through
/// conjugate symmetry C[M-m][n] = conj(C[m][n]).
struct CoefficientMatrix {
    enum class Kind { Plain, TimeDerivativeWindow };

    Eigen::MatrixXcd rows;  // (channels/2+1) x frames
    StftParams params;
    Kind kind = Kind::Plain;

    std::complex<double> entry(int m, Eigen::Index n) const {
        const int M = params.channels;
        if (m < 0 || m >= M || n < 0 || n >= rows.cols())
            throw Error(ErrKind::OutOfBounds, "coefficient index out of range");
        if (m <= M / 2) return rows(m, n);
        return std::conj(rows(M - m, n));
    }
};

/// g[l] = sin(pi/2 * cos^2(pi (l - L/2) / L)); squared translates by L/2 sum to 1.
Eigen::VectorXd itersine_window(int length);

/// Per-sample derivative of the periodized window via spectral differentiation
/// (Nyquist bin zeroed). For g[l]=sin(2 pi l/L) this returns (2 pi/L) cos(2 pi l/L).
Eigen::VectorXd derivative_window(const Eigen::VectorXd& window);

/// Circular analysis of a real signal: C[m][n] = sum_l x[l] g(l - n hop) e^{-2 pi i m l / M},
/// window indexed around its center and wrapped modulo the signal length.
CoefficientMatrix stft(const Eigen::VectorXd& signal, const StftParams& params,
                       const Eigen::VectorXd& window,
                       CoefficientMatrix::Kind kind = CoefficientMatrix::Kind::Plain);

/// Tight-frame inversion: synthesis with window/frame_constant. Requires the
/// squared window translates to sum to a constant (checked to 1e-9 relative).
Eigen::VectorXd istft(const CoefficientMatrix& coeffs, const Eigen::VectorXd& window);

/// Sum of squared window translates at hop `hop` per residue class; constant
/// (= win_length/(2 hop)) for the Itersine window when win_length/(2 hop) is integral.
Eigen::VectorXd frame_diagonal(const Eigen::VectorXd& window, int hop);

}  // namespace simgap
