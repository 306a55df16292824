#include "simgap/stft.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <map>
#include <vector>

namespace simgap {

namespace {

using Cplx = std::complex<double>;

// Phase factors e^{-2 pi i m r / M} for the residues r = (n*hop) mod M that
// actually occur; keyed by residue. One table per stft/istft call.
class PhaseTable {
  public:
    PhaseTable(int channels, int rows) : channels_(channels), rows_(rows) {}

    const Eigen::VectorXcd& forward(Eigen::Index frame_pos) {
        const int r = static_cast<int>(frame_pos % channels_);
        auto it = cache_.find(r);
        if (it != cache_.end()) return it->second;
        Eigen::VectorXcd v(rows_);
        for (int m = 0; m < rows_; ++m) {
            const double ang = -2.0 * M_PI * m * r / channels_;
            v(m) = Cplx(std::cos(ang), std::sin(ang));
        }
        return cache_.emplace(r, std::move(v)).first->second;
    }

  private:
    int channels_;
    int rows_;
    std::map<int, Eigen::VectorXcd> cache_;
};

}  // namespace

Eigen::VectorXd itersine_window(int length) {
    if (length <= 0 || length % 2 != 0)
        throw Error(ErrKind::InvalidLength, "itersine window length must be even and positive");
    Eigen::VectorXd g(length);
    for (int l = 0; l < length; ++l) {
        const double x = M_PI * (l - length / 2) / length;
        const double c = std::cos(x);
        g(l) = std::sin(M_PI_2 * c * c);
    }
    return g;
}

Eigen::VectorXd derivative_window(const Eigen::VectorXd& window) {
    const Eigen::Index n = window.size();
    if (n == 0) throw Error(ErrKind::InvalidLength, "empty window");
    if (n == 1) return Eigen::VectorXd::Zero(1);

    Eigen::FFT<double> fft;
    std::vector<double> in(window.data(), window.data() + n);
    std::vector<Cplx> spec;
    fft.fwd(spec, in);  // full spectrum, size n

    for (Eigen::Index k = 0; k < n; ++k) {
        double freq;  // signed bin index
        if (2 * k < n)
            freq = static_cast<double>(k);
        else if (2 * k == n)
            freq = 0.0;  // Nyquist carries no odd derivative information
        else
            freq = static_cast<double>(k) - static_cast<double>(n);
        spec[static_cast<std::size_t>(k)] *= Cplx(0.0, 2.0 * M_PI * freq / n);
    }
    std::vector<Cplx> out;
    fft.inv(out, spec);
    Eigen::VectorXd d(n);
    for (Eigen::Index k = 0; k < n; ++k) d(k) = out[static_cast<std::size_t>(k)].real();
    return d;
}

Eigen::VectorXd frame_diagonal(const Eigen::VectorXd& window, int hop) {
    if (hop <= 0) throw Error(ErrKind::ParamMismatch, "hop must be positive");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(hop);
    for (Eigen::Index l = 0; l < window.size(); ++l)
        acc(static_cast<int>(l % hop)) += window(l) * window(l);
    return acc;
}

CoefficientMatrix stft(const Eigen::VectorXd& signal, const StftParams& params,
                       const Eigen::VectorXd& window, CoefficientMatrix::Kind kind) {
    StftParams p = params;
    p.signal_length = signal.size();
    p.validate();
    if (window.size() != p.win_length)
        throw Error(ErrKind::ParamMismatch, "window length does not match params");

    const int M = p.channels;
    const int R = p.spectrum_rows();
    const int half = p.win_length / 2;
    const Eigen::Index L = p.signal_length;
    const Eigen::Index N = p.frames();

    CoefficientMatrix out;
    out.params = p;
    out.kind = kind;
    out.rows.resize(R, N);

    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    PhaseTable phases(M, R);
    std::vector<double> buf(static_cast<std::size_t>(M));
    std::vector<Cplx> spec(static_cast<std::size_t>(R));

    Eigen::Map<Eigen::VectorXd> bufv(buf.data(), M);
    for (Eigen::Index n = 0; n < N; ++n) {
        bufv.setZero();
        const Eigen::Index pos = n * p.hop;
        if (pos - half >= 0 && pos + half <= L) {
            // interior frame: no wrap, two contiguous windowed copies
            bufv.head(half) = signal.segment(pos, half).cwiseProduct(window.tail(half));
            bufv.tail(half) = signal.segment(pos - half, half).cwiseProduct(window.head(half));
        } else {
            for (int j = -half; j < half; ++j) {
                Eigen::Index l = (pos + j) % L;
                if (l < 0) l += L;
                const int slot = j >= 0 ? j : j + M;
                buf[static_cast<std::size_t>(slot)] = signal(l) * window(j + half);
            }
        }
        fft.fwd(spec.data(), buf.data(), M);
        const Eigen::VectorXcd& ph = phases.forward(pos);
        for (int m = 0; m < R; ++m) out.rows(m, n) = spec[static_cast<std::size_t>(m)] * ph(m);
    }
    return out;
}

Eigen::VectorXd istft(const CoefficientMatrix& coeffs, const Eigen::VectorXd& window) {
    const StftParams& p = coeffs.params;
    p.validate();
    if (window.size() != p.win_length)
        throw Error(ErrKind::ParamMismatch, "window length does not match params");
    if (coeffs.rows.rows() != p.spectrum_rows() || coeffs.rows.cols() != p.frames())
        throw Error(ErrKind::DimensionMismatch, "coefficient matrix does not match params");

    // Painless tight-frame inversion needs a constant frame diagonal.
    const Eigen::VectorXd diag = frame_diagonal(window, p.hop);
    const double frame_const = diag.mean();
    if (frame_const <= 0.0 ||
        (diag.maxCoeff() - diag.minCoeff()) > 1e-9 * std::max(1.0, frame_const))
        throw Error(ErrKind::NotInvertible, "window translates do not form a tight frame");

    const int M = p.channels;
    const int R = p.spectrum_rows();
    const int half = p.win_length / 2;
    const Eigen::Index L = p.signal_length;
    const Eigen::Index N = p.frames();

    Eigen::VectorXd out = Eigen::VectorXd::Zero(L);
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    PhaseTable phases(M, R);
    std::vector<Cplx> spec(static_cast<std::size_t>(R));
    std::vector<double> buf(static_cast<std::size_t>(M));

    for (Eigen::Index n = 0; n < N; ++n) {
        const Eigen::Index pos = n * p.hop;
        const Eigen::VectorXcd& ph = phases.forward(pos);
        for (int m = 0; m < R; ++m)
            spec[static_cast<std::size_t>(m)] = coeffs.rows(m, n) * std::conj(ph(m));
        fft.inv(buf.data(), spec.data(), M);
        for (int j = -half; j < half; ++j) {
            Eigen::Index l = (pos + j) % L;
            if (l < 0) l += L;
            const int slot = j >= 0 ? j : j + M;
            out(l) += buf[static_cast<std::size_t>(slot)] * window(j + half);
        }
    }
    return out / frame_const;
}

}  // namespace simgap
