#include "simgap/resample.hpp"

#include <algorithm>
#include <cmath>

namespace simgap {

namespace {

double bessel_i0(double x) {
    // Power series; converges quickly for the beta values used here.
    double sum = 1.0, term = 1.0;
    const double q = x * x / 4.0;
    for (int k = 1; k < 64; ++k) {
        term *= q / (k * k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

}  // namespace

int decimation_factor(int sample_rate, double max_rate) {
    if (max_rate <= 0) throw Error(ErrKind::InvalidRate, "max rate must be positive");
    if (sample_rate <= 0) throw Error(ErrKind::InvalidRate, "sample rate must be positive");
    return static_cast<int>(std::ceil(sample_rate / max_rate));
}

Eigen::VectorXd antialias_taps(int sample_rate, int factor) {
    const double atten_db = 60.0;
    const double beta = 0.1102 * (atten_db - 8.7);
    const double trans_hz = sample_rate / (20.0 * factor);
    const double delta_omega = 2.0 * M_PI * trans_hz / sample_rate;
    int taps = static_cast<int>(std::ceil((atten_db - 7.95) / (2.285 * delta_omega)));
    if (taps % 2 == 0) ++taps;  // odd length -> integer group delay

    // Cutoff centered half a transition band below the new Nyquist so the
    // stopband starts at sample_rate/(2 factor).
    const double cutoff = sample_rate / (2.0 * factor) - trans_hz / 2.0;
    const double fc = cutoff / sample_rate;  // normalized [0, 0.5)

    Eigen::VectorXd h(taps);
    const int mid = (taps - 1) / 2;
    const double i0b = bessel_i0(beta);
    for (int t = 0; t < taps; ++t) {
        const int n = t - mid;
        double sinc = (n == 0) ? 2.0 * fc : std::sin(2.0 * M_PI * fc * n) / (M_PI * n);
        const double r = static_cast<double>(t) / (taps - 1) * 2.0 - 1.0;
        const double w = bessel_i0(beta * std::sqrt(1.0 - r * r)) / i0b;
        h(t) = sinc * w;
    }
    h /= h.sum();  // unit DC gain
    return h;
}

DecimatedSignal decimate(const AudioBuffer& mono, double max_rate) {
    if (mono.channel_count() != 1)
        throw Error(ErrKind::ParamMismatch, "decimate expects a mono buffer");
    const int d = decimation_factor(mono.sample_rate, max_rate);
    if (d == 1) return {mono.channels.front(), mono.sample_rate, 1};

    const Eigen::VectorXd& x = mono.channels.front();
    const Eigen::VectorXd h = antialias_taps(mono.sample_rate, d);
    const Eigen::Index taps = h.size();
    const Eigen::Index mid = (taps - 1) / 2;
    const Eigen::Index len = x.size();
    const Eigen::Index out_len = (len + d - 1) / d;

    const Eigen::VectorXd hr = h.reverse();
    Eigen::VectorXd y(out_len);
    for (Eigen::Index i = 0; i < out_len; ++i) {
        // Group-delay compensated: output i corresponds to input position i*d.
        const Eigen::Index center = i * d + mid;
        const Eigen::Index t0 = std::max<Eigen::Index>(0, center - (taps - 1));
        const Eigen::Index t1 = std::min<Eigen::Index>(center, len - 1);
        const Eigen::Index n = t1 - t0 + 1;
        // sum_t x(t) h(center-t) == dot(x[t0..t1], hr[t0-(center-taps+1)..])
        y(i) = x.segment(t0, n).dot(hr.segment(t0 - (center - taps + 1), n));
    }
    return {std::move(y), mono.sample_rate, d};
}

}  // namespace simgap
