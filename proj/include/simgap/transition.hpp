#pragma once

#include <vector>

#include "simgap/simgraph.hpp"

namespace simgap {

/// Entry edge (l0,k0) jumps out shortly before the gap, exit edge (l1,k1)
/// jumps back shortly after it; playback routes l0 -> k0 ... l1 -> k1, so the
/// frames [k0, l1] replace [l0, k1].
struct TransitionPair {
    int l0 = 0, k0 = 0;
    int l1 = 0, k1 = 0;
    double w0 = 0.0, w1 = 0.0;
    double objective_value = 0.0;

    int duration_mismatch() const { return std::abs((k1 - l0) - (l1 - k0)); }
};

struct ObjectiveParams {
    double gamma_len = 1.0;  // weight on border distances (paper's gamma_2)
    double gamma_w = 100.0;  // weight on inverse edge weights (paper's gamma_3)

    void validate() const {
        if (gamma_len < 0 || gamma_w < 0)
            throw Error(ErrKind::InvalidArgs, "objective weights must be nonnegative");
    }
};

struct TransitionQuery {
    int d_s = 0;  // gap start frame
    int d_e = 0;  // gap end frame
    int eps_before = 1;
    int eps_after = 1;
    int min_replacement = 0;  // frames; shorter candidates rejected
    const std::vector<char>* valid = nullptr;  // frame validity (gap masked)
};

/// All edge pairs from the reduced Ws satisfying the TransitionPair
/// invariants: l0 in [d_s-eps1, d_s], k1 in [d_e, d_e+eps2], k0 < l1,
/// replacement [k0, l1] meets no invalid frame. Exit edges are the stored
/// entries with row in [d_e, d_e+eps2], read transposed. Throws
/// CandidateOverflow past 10^6 pairs.
std::vector<TransitionPair> acceptable_pairs(const SparseWeights& ws, const TransitionQuery& q);

/// f = |(k1-l0)-(l1-k0)| + gamma_len((d_s-l0)+(k1-d_e)) + gamma_w(1/w0 + 1/w1)
double objective(const TransitionPair& pair, int d_s, int d_e, const ObjectiveParams& params);

/// Exhaustive argmin of the objective; ties broken by smaller duration
/// mismatch, then smaller l0, then smaller k1. Throws NoTransitionFound when
/// no acceptable pair exists.
TransitionPair select(const SparseWeights& ws, const TransitionQuery& q,
                      const ObjectiveParams& params);

}  // namespace simgap
