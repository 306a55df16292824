#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "simgap/errors.hpp"

namespace simgap {

/// Multichannel audio in [-1,1] floats plus its sample rate.
struct AudioBuffer {
    std::vector<Eigen::VectorXd> channels;
    int sample_rate = 0;

    AudioBuffer() = default;
    AudioBuffer(std::vector<Eigen::VectorXd> ch, int rate)
        : channels(std::move(ch)), sample_rate(rate) {}

    Eigen::Index length() const { return channels.empty() ? 0 : channels.front().size(); }
    int channel_count() const { return static_cast<int>(channels.size()); }

    // Enforces the type invariants: equal channel lengths, positive rate, finite samples.
    void validate() const {
        if (sample_rate <= 0)
            throw Error(ErrKind::InvalidRate, "sample rate must be positive");
        if (channels.empty() || length() == 0)
            throw Error(ErrKind::EmptySignal, "buffer holds no samples");
        for (const auto& c : channels) {
            if (c.size() != length())
                throw Error(ErrKind::DimensionMismatch, "channel lengths differ");
            if (!c.allFinite())
                throw Error(ErrKind::CorruptData, "non-finite samples");
        }
    }
};

/// Average all channels into one. Mono input is returned unchanged.
inline AudioBuffer downmix_mono(const AudioBuffer& buf) {
    if (buf.channels.empty())
        throw Error(ErrKind::EmptySignal, "no channels to downmix");
    if (buf.channel_count() == 1) return buf;
    Eigen::VectorXd mono = buf.channels.front();
    for (int c = 1; c < buf.channel_count(); ++c) mono += buf.channels[c];
    mono /= static_cast<double>(buf.channel_count());
    return AudioBuffer({std::move(mono)}, buf.sample_rate);
}

/// A [start,end) interval of lost samples in the undecimated signal.
struct GapSpec {
    std::int64_t start_sample = 0;
    std::int64_t end_sample = 0;

    GapSpec() = default;
    GapSpec(std::int64_t start, std::int64_t end) : start_sample(start), end_sample(end) {
        if (start < 0 || start >= end)
            throw Error(ErrKind::InvalidGap, "gap must satisfy 0 <= start < end");
    }

    void check_within(std::int64_t signal_length) const {
        if (end_sample > signal_length)
            throw Error(ErrKind::GapOutOfBounds, "gap extends past the signal");
    }

    // Frame bounds at the analysis frame rate (effective hop in undecimated samples).
    int frame_start(std::int64_t hop) const {
        return static_cast<int>(start_sample / hop);
    }
    int frame_end(std::int64_t hop) const {
        return static_cast<int>((end_sample + hop - 1) / hop);
    }
};

}  // namespace simgap
