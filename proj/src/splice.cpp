#include "simgap/splice.hpp"

#include <algorithm>
#include <cmath>

#include "simgap/stft.hpp"

namespace simgap {

namespace {

double sample_at(const Eigen::VectorXd& x, std::int64_t t) {
    return (t < 0 || t >= x.size()) ? 0.0 : x(t);
}

// Window of length n starting at t0, zero-extended beyond the signal and
// optionally zeroed inside the gap's sample range.
Eigen::VectorXd gather(const Eigen::VectorXd& x, std::int64_t t0, std::int64_t n,
                       const GapSpec* gap) {
    Eigen::VectorXd out(n);
    for (std::int64_t j = 0; j < n; ++j) {
        const std::int64_t t = t0 + j;
        if (gap && t >= gap->start_sample && t < gap->end_sample)
            out(j) = 0.0;
        else
            out(j) = sample_at(x, t);
    }
    return out;
}

std::int64_t argmax_correlation(const Eigen::VectorXd& x, std::int64_t scan_start,
                                std::int64_t scan_count, std::int64_t half_window,
                                const Eigen::VectorXd& target, const GapSpec& gap) {
    // All candidate windows live inside one gathered region.
    const std::int64_t width = 2 * half_window;
    const Eigen::VectorXd region = gather(x, scan_start - half_window, scan_count - 1 + width, &gap);
    std::int64_t best = scan_start;
    double best_ip = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < scan_count; ++i) {
        const double ip = region.segment(i, width).dot(target);
        if (ip > best_ip) {  // strict: ties keep the smallest index
            best_ip = ip;
            best = scan_start + i;
        }
    }
    return best;
}

}  // namespace

std::int64_t spliced_length(const TransitionPair& pair, const SplicePlan& plan,
                            std::int64_t signal_length) {
    const std::int64_t n2 = pair.l0 + (pair.l1 - pair.k0);
    return signal_length - plan.cut_end + n2 * plan.hop;
}

SplicePlan make_splice_plan(const TransitionPair& pair, std::int64_t hop,
                            std::int64_t half_window, std::int64_t signal_length) {
    if (hop <= 0 || half_window <= 0 || half_window % hop != 0)
        throw Error(ErrKind::ParamMismatch, "half window must be a positive multiple of the hop");
    SplicePlan plan;
    plan.hop = hop;
    plan.half_window = half_window;
    plan.cut_start = hop * pair.l0;
    plan.cut_end = hop * pair.k1;

    const int r = plan.margin_frames();
    const std::int64_t frames = (signal_length + hop - 1) / hop;
    if (pair.l0 < r || pair.k1 + r > frames)
        throw Error(ErrKind::OutOfBounds, "transition too close to the signal edge");
    if (pair.l1 - pair.k0 < 2 * r)
        throw Error(ErrKind::OutOfBounds, "replacement shorter than the cross-fade support");
    return plan;
}

void refine_offsets(SplicePlan& plan, const Eigen::VectorXd& mono, const TransitionPair& pair,
                    const GapSpec& gap) {
    const std::int64_t hop = plan.hop;
    const std::int64_t half = plan.half_window;

    // Entry cut: match the window around the replacement start a~*k0.
    const Eigen::VectorXd target0 =
        gather(mono, hop * pair.k0 - half, 2 * half, nullptr);
    plan.cut_start = argmax_correlation(mono, hop * pair.l0 - hop / 2, hop, half, target0, gap);

    // Exit cut: match the window around the replacement end a~*l1.
    const Eigen::VectorXd target1 =
        gather(mono, hop * pair.l1 - half, 2 * half, nullptr);
    plan.cut_end = argmax_correlation(mono, hop * pair.k1 - hop / 2, hop, half, target1, gap);
}

namespace {

// Cross-fade around output frame J: frames [J-r, J) carry the left content
// (shift dl), frames [J, J+r) the right content (shift dr). Writes the output
// samples [J*hop - half, (J-1)*hop + half) for which the computed frames are
// the complete contributing set; everything else is a plain copy elsewhere.
void render_junction(const Eigen::VectorXd& x, Eigen::VectorXd& out, std::int64_t J,
                     std::int64_t dl, std::int64_t dr, std::int64_t hop, std::int64_t half,
                     int r, const Eigen::VectorXd& window) {
    const std::int64_t fft_len = 2 * half;       // window length == channel count
    const int pad_frames = static_cast<int>(fft_len / hop);
    const int n_frames = 2 * r + 2 * pad_frames;
    const std::int64_t seg_len = static_cast<std::int64_t>(n_frames) * hop;
    const std::int64_t base_frame = J - r - pad_frames;

    StftParams p;
    p.win_length = static_cast<int>(fft_len);
    p.hop = static_cast<int>(hop);
    p.channels = static_cast<int>(fft_len);
    p.signal_length = seg_len;

    const Eigen::VectorXd seg_left = gather(x, base_frame * hop + dl, seg_len, nullptr);
    const Eigen::VectorXd seg_right = gather(x, base_frame * hop + dr, seg_len, nullptr);
    const CoefficientMatrix c_left = stft(seg_left, p, window);
    CoefficientMatrix combined = stft(seg_right, p, window);

    // Columns before the junction come from the left content.
    const int boundary = r + pad_frames;  // local frame of global J
    combined.rows.leftCols(boundary) = c_left.rows.leftCols(boundary);

    const Eigen::VectorXd y = istft(combined, window);

    const std::int64_t out_lo = J * hop - half;
    const std::int64_t out_hi = (J - 1) * hop + half;
    for (std::int64_t t = out_lo; t < out_hi; ++t) {
        const std::int64_t local = t - base_frame * hop;
        if (t >= 0 && t < out.size()) out(t) = y(local);
    }
}

}  // namespace

AudioBuffer crossfade_splice(const AudioBuffer& buf, const TransitionPair& pair,
                             const SplicePlan& plan) {
    const std::int64_t hop = plan.hop;
    const std::int64_t half = plan.half_window;
    const std::int64_t L = buf.length();
    const int r = plan.margin_frames();
    const std::int64_t n2 = pair.l0 + (pair.l1 - pair.k0);
    const std::int64_t L_out = spliced_length(pair, plan, L);
    if (L_out <= 0) throw Error(ErrKind::OutOfBounds, "empty spliced output");

    const std::int64_t d1 = plan.cut_start - hop * pair.l0;  // block-1 content shift
    const std::int64_t d2 = hop * (pair.k0 - pair.l0);       // replacement block shift
    const std::int64_t d3 = plan.cut_end - n2 * hop;         // tail block shift

    const std::int64_t a1 = pair.l0 * hop - half;
    const std::int64_t b1 = (pair.l0 - 1) * hop + half;
    const std::int64_t a2 = n2 * hop - half;
    const std::int64_t b2 = (n2 - 1) * hop + half;
    if (a1 < 0 || b1 > a2 || b2 > L_out)
        throw Error(ErrKind::OutOfBounds, "cross-fade regions do not fit the signal");

    const Eigen::VectorXd window = itersine_window(static_cast<int>(2 * half));

    AudioBuffer out;
    out.sample_rate = buf.sample_rate;
    for (const auto& x : buf.channels) {
        Eigen::VectorXd y(L_out);
        for (std::int64_t t = 0; t < a1; ++t) y(t) = sample_at(x, t + d1);
        for (std::int64_t t = b1; t < a2; ++t) y(t) = sample_at(x, t + d2);
        for (std::int64_t t = b2; t < L_out; ++t) y(t) = sample_at(x, t + d3);
        render_junction(x, y, pair.l0, d1, d2, hop, half, r, window);
        render_junction(x, y, n2, d2, d3, hop, half, r, window);
        out.channels.push_back(std::move(y));
    }
    return out;
}

}  // namespace simgap
