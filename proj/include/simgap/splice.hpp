#pragma once

#include <cstdint>

#include "simgap/audio.hpp"
#include "simgap/transition.hpp"

namespace simgap {

/// Sample-level plan derived from a frame-level TransitionPair on the
/// undecimated signal: effective hop (a~ = a*d), half cross-fade window
/// (Lw~ = (L_w/2)*d) and the correlation-refined cut positions.
struct SplicePlan {
    std::int64_t hop = 0;          // a~
    std::int64_t half_window = 0;  // Lw~; cross-fade window g~ has length 2*Lw~
    std::int64_t cut_start = 0;    // refined l0~, replaces a~*l0
    std::int64_t cut_end = 0;      // refined k1~, replaces a~*k1

    int margin_frames() const {  // r = 2*ceil(Lw~/a~): columns computed per side
        return static_cast<int>(2 * ((half_window + hop - 1) / hop));
    }
};

/// Frame-aligned plan (cut positions at a~*l0 / a~*k1) with bounds checks;
/// throws OutOfBounds when a junction would not fit inside the signal.
SplicePlan make_splice_plan(const TransitionPair& pair, std::int64_t hop,
                            std::int64_t half_window, std::int64_t signal_length);

/// Shift each cut by up to hop/2 samples to maximize the plain inner product
/// between the (gap-zeroed) signal window around the cut and the window around
/// its replacement counterpart; ties pick the smallest index.
void refine_offsets(SplicePlan& plan, const Eigen::VectorXd& mono, const TransitionPair& pair,
                    const GapSpec& gap);

/// Assemble the restored signal: time-domain copies outside the two
/// cross-fade regions, and inside each region the inverse STFT of the
/// spliced coefficient columns (length-2Lw~ Itersine window, hop a~),
/// computed on segments extended by the window length so the result matches
/// the full coefficient-matrix construction. All channels are cut at the
/// same positions.
AudioBuffer crossfade_splice(const AudioBuffer& buf, const TransitionPair& pair,
                             const SplicePlan& plan);

/// Restored length: L - cut_end + (l0 + l1 - k0) * hop.
std::int64_t spliced_length(const TransitionPair& pair, const SplicePlan& plan,
                            std::int64_t signal_length);

}  // namespace simgap
