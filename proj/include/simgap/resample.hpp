#pragma once

#include <Eigen/Dense>

#include "simgap/audio.hpp"

namespace simgap {

/// Anti-aliased, integer-factor decimated mono signal. The decimated rate
/// source_rate/factor is kept as an exact rational (it is not always integral).
struct DecimatedSignal {
    Eigen::VectorXd samples;
    int source_rate = 0;
    int factor = 1;

    double rate() const { return static_cast<double>(source_rate) / factor; }
};

/// d = ceil(rate/max_rate). Returns 1 when no decimation is needed.
int decimation_factor(int sample_rate, double max_rate);

/// Linear-phase Kaiser low-pass used before decimation: >= 60 dB stopband,
/// transition width rate/(20 d), cutoff centered just below the new Nyquist.
Eigen::VectorXd antialias_taps(int sample_rate, int factor);

/// Decimate a mono buffer to at most max_rate Hz. Group delay of the FIR is
/// compensated exactly (odd symmetric filter); only every d-th output sample
/// is evaluated.
DecimatedSignal decimate(const AudioBuffer& mono, double max_rate);

}  // namespace simgap
