#include "simgap/transition.hpp"

#include <algorithm>
#include <cmath>

namespace simgap {

namespace {

constexpr std::size_t kCandidateCap = 1000000;

bool replacement_clear(const std::vector<char>* valid, int k0, int l1) {
    if (!valid) return true;
    for (int n = k0; n <= l1; ++n)
        if (!(*valid)[static_cast<std::size_t>(n)]) return false;
    return true;
}

}  // namespace

std::vector<TransitionPair> acceptable_pairs(const SparseWeights& ws, const TransitionQuery& q) {
    if (q.d_s >= q.d_e) throw Error(ErrKind::InvalidGap, "gap frame bounds out of order");

    std::vector<std::pair<int, int>> outs;  // stored (l0, k0)
    std::vector<std::pair<int, int>> ins;   // stored (k1, l1): rows after the gap
    std::vector<double> outs_w, ins_w;
    for (const auto& e : ws.entries) {
        if (e.l >= q.d_s - q.eps_before && e.l <= q.d_s) {
            outs.emplace_back(e.l, e.k);
            outs_w.push_back(e.weight);
        }
        if (e.l >= q.d_e && e.l <= q.d_e + q.eps_after) {
            ins.emplace_back(e.l, e.k);
            ins_w.push_back(e.weight);
        }
    }

    if (outs.size() * ins.size() > kCandidateCap)
        throw Error(ErrKind::CandidateOverflow,
                    "candidate pair count exceeds " + std::to_string(kCandidateCap));

    std::vector<TransitionPair> pairs;
    for (std::size_t a = 0; a < outs.size(); ++a) {
        for (std::size_t b = 0; b < ins.size(); ++b) {
            TransitionPair p;
            p.l0 = outs[a].first;
            p.k0 = outs[a].second;
            p.k1 = ins[b].first;  // stored row is near the gap end
            p.l1 = ins[b].second;
            p.w0 = outs_w[a];
            p.w1 = ins_w[b];
            if (p.k0 >= p.l1) continue;  // replacement must be nonempty
            if (p.l1 - p.k0 < q.min_replacement) continue;
            if (!replacement_clear(q.valid, p.k0, p.l1)) continue;
            pairs.push_back(p);
        }
    }
    return pairs;
}

double objective(const TransitionPair& pair, int d_s, int d_e, const ObjectiveParams& params) {
    params.validate();
    if (pair.w0 <= 0 || pair.w1 <= 0)
        throw Error(ErrKind::InvalidArgs, "edge weights must be positive");
    const double mismatch = std::abs(static_cast<double>((pair.k1 - pair.l0) - (pair.l1 - pair.k0)));
    const double borders = static_cast<double>((d_s - pair.l0) + (pair.k1 - d_e));
    const double weights = 1.0 / pair.w0 + 1.0 / pair.w1;
    return mismatch + params.gamma_len * borders + params.gamma_w * weights;
}

TransitionPair select(const SparseWeights& ws, const TransitionQuery& q,
                      const ObjectiveParams& params) {
    auto pairs = acceptable_pairs(ws, q);
    if (pairs.empty())
        throw Error(ErrKind::NoTransitionFound,
                    "no acceptable transition pair; try lowering t_w or widening epsilon");

    bool have = false;
    TransitionPair best;
    for (auto& p : pairs) {
        p.objective_value = objective(p, q.d_s, q.d_e, params);
        const auto key = std::tuple(p.objective_value, p.duration_mismatch(), p.l0, p.k1);
        const auto best_key =
            std::tuple(best.objective_value, best.duration_mismatch(), best.l0, best.k1);
        if (!have || key < best_key) {
            best = p;
            have = true;
        }
    }
    return best;
}

}  // namespace simgap
