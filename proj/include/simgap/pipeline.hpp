#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simgap/audio.hpp"
#include "simgap/config.hpp"
#include "simgap/features.hpp"
#include "simgap/resample.hpp"
#include "simgap/simgraph.hpp"
#include "simgap/splice.hpp"
#include "simgap/transition.hpp"

namespace simgap {

/// Wall-clock seconds per processing step, mirroring the four pipeline stages.
struct StageTimings {
    double feature_extraction = 0.0;
    double graph_construction = 0.0;
    double transition_selection = 0.0;
    double signal_reconstruction = 0.0;

    double total() const {
        return feature_extraction + graph_construction + transition_selection +
               signal_reconstruction;
    }
};

/// Decimation + features of a signal, reusable across gaps on the same file.
struct AnalysisContext {
    AudioBuffer mono;  // undecimated downmix (refinement runs on it)
    DecimatedSignal decimated;
    FeatureMatrix features;
    std::int64_t hop = 0;          // effective hop a~ on the undecimated signal
    std::int64_t half_window = 0;  // Lw~
    int eps_frames = 0;            // round(epsilon_seconds * frame_rate)
};

struct GapReport {
    GapSpec gap;
    int d_s = 0, d_e = 0;
    std::size_t candidate_count = 0;
    TransitionPair pair;
    double term_mismatch = 0.0, term_borders = 0.0, term_weights = 0.0;
    SplicePlan plan;
    std::int64_t output_length = 0;
};

struct InpaintResult {
    AudioBuffer restored;
    std::vector<GapReport> gaps;
    StageTimings timings;
    std::vector<SparseWeights> reduced_graphs;  // one per gap, for exports
};

/// Features of the mono downmix with every gap's frames invalidated.
/// Counted under feature extraction in the stage timings.
AnalysisContext analyze_signal(const AudioBuffer& input, const std::vector<GapSpec>& gaps,
                               const AlgoConfig& cfg, StageTimings* timings = nullptr);

/// Full §-by-§ pipeline: features once, then per gap (in increasing order)
/// reduced graph -> transition selection -> correlation refinement, and one
/// right-to-left splice pass over all channels.
InpaintResult run_inpaint(const AudioBuffer& input, std::vector<GapSpec> gaps,
                          const AlgoConfig& cfg);

/// Graph parameters derived from the config and the analysis context.
GraphParams graph_params(const AlgoConfig& cfg, const AnalysisContext& ctx);

struct VerifyTrial {
    std::int64_t gap_start = 0;
    std::int64_t gap_end = 0;
    double rel_error = 0.0;
    bool pass = false;
};

struct VerifyResult {
    std::vector<VerifyTrial> trials;
    std::uint64_t seed = 0;
    bool pass = false;
};

/// §VI-A protocol: trim the input to a multiple of a~, double it, cut a
/// seeded random 'gap_seconds' gap (outside the outer 5% and away from the
/// copy seam), zero it, inpaint, and compare with the uncorrupted double.
/// PASS iff every trial's relative l2 error is below 1e-6.
VerifyResult run_verify(const AudioBuffer& input, double gap_seconds, int trials,
                        std::uint64_t seed, const AlgoConfig& cfg);

/// Deterministic benchmark gap: 2 s starting at 45% of the file.
GapSpec bench_gap(std::int64_t length, int sample_rate);

}  // namespace simgap
