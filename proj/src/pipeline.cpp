#include "simgap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "simgap/stft.hpp"

namespace simgap {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Zero-pad by a full window on each side so features are local (no circular
// wrap); frames re-aligned so frame n is centered at sample n*a of the input.
Eigen::VectorXd pad_for_analysis(const Eigen::VectorXd& x, int win_length, int hop,
                                 Eigen::Index* n_frames) {
    const Eigen::Index n = (x.size() + hop - 1) / hop;
    *n_frames = n;
    const Eigen::Index body = n * hop;
    const Eigen::Index padded = body + 2 * win_length;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(padded);
    out.segment(win_length, x.size()) = x;
    return out;
}

}  // namespace

GraphParams graph_params(const AlgoConfig& cfg, const AnalysisContext& ctx) {
    GraphParams gp;
    gp.k_neighbors = cfg.K;
    gp.kernel_length = cfg.L_K;
    gp.threshold = cfg.t_w;
    gp.exclude_radius = cfg.L_K;
    gp.eps_before = ctx.eps_frames;
    gp.eps_after = ctx.eps_frames;
    gp.approx = cfg.approx_knn();
    return gp;
}

AnalysisContext analyze_signal(const AudioBuffer& input, const std::vector<GapSpec>& gaps,
                               const AlgoConfig& cfg, StageTimings* timings) {
    cfg.validate();
    input.validate();
    const double t0 = now_seconds();

    AnalysisContext ctx;
    ctx.mono = downmix_mono(input);
    ctx.decimated = decimate(ctx.mono, cfg.xi_max);
    const int d = ctx.decimated.factor;
    ctx.hop = static_cast<std::int64_t>(cfg.a) * d;
    ctx.half_window = static_cast<std::int64_t>(cfg.L_w / 2) * d;
    const double frame_rate = static_cast<double>(input.sample_rate) / static_cast<double>(ctx.hop);
    ctx.eps_frames = std::max(1, static_cast<int>(std::lround(cfg.epsilon_seconds * frame_rate)));

    Eigen::Index n_frames = 0;
    const Eigen::VectorXd padded =
        pad_for_analysis(ctx.decimated.samples, cfg.L_w, cfg.a, &n_frames);

    StftParams sp;
    sp.win_length = cfg.L_w;
    sp.hop = cfg.a;
    sp.channels = cfg.M;
    sp.signal_length = padded.size();

    const Eigen::VectorXd win = itersine_window(cfg.L_w);
    const Eigen::VectorXd dwin = derivative_window(win);
    const Eigen::Index skip = cfg.L_w / cfg.a;  // frames inside the leading pad

    Eigen::MatrixXd f1, f2;
    {
        CoefficientMatrix c = stft(padded, sp, win);
        CoefficientMatrix c_td =
            stft(padded, sp, dwin, CoefficientMatrix::Kind::TimeDerivativeWindow);
        c.rows = c.rows.middleCols(skip, n_frames).eval();
        c_td.rows = c_td.rows.middleCols(skip, n_frames).eval();
        c.params.signal_length = n_frames * cfg.a;
        c_td.params.signal_length = n_frames * cfg.a;

        f1 = db_feature(c, cfg.t_s);
        f2 = relative_if_feature(c, c_td, f1, cfg.v_len);
    }
    ctx.features = assemble(f1, f2, cfg.lambda, frame_rate, cfg.M);

    for (const auto& gap : gaps)
        invalidate_gap(ctx.features, gap, ctx.hop, ctx.half_window, input.length());

    if (timings) timings->feature_extraction += now_seconds() - t0;
    return ctx;
}

InpaintResult run_inpaint(const AudioBuffer& input, std::vector<GapSpec> gaps,
                          const AlgoConfig& cfg) {
    if (gaps.empty()) throw Error(ErrKind::InvalidGap, "no gap specified");
    std::sort(gaps.begin(), gaps.end(),
              [](const GapSpec& a, const GapSpec& b) { return a.start_sample < b.start_sample; });
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        gaps[i].check_within(input.length());
        if (i > 0 && gaps[i].start_sample < gaps[i - 1].end_sample)
            throw Error(ErrKind::InvalidGap, "gaps overlap");
    }

    InpaintResult res;
    AnalysisContext ctx = analyze_signal(input, gaps, cfg, &res.timings);
    const ObjectiveParams obj{cfg.gamma_len, cfg.gamma_w};

    // Select every transition against original-sample indexing first.
    for (const auto& gap : gaps) {
        GapReport rep;
        rep.gap = gap;
        rep.d_s = gap.frame_start(ctx.hop);
        rep.d_e = gap.frame_end(ctx.hop);

        double t0 = now_seconds();
        SparseWeights ws = reduced_graph(ctx.features, rep.d_s, rep.d_e, graph_params(cfg, ctx));
        res.timings.graph_construction += now_seconds() - t0;

        t0 = now_seconds();
        TransitionQuery q;
        q.d_s = rep.d_s;
        q.d_e = rep.d_e;
        q.eps_before = ctx.eps_frames;
        q.eps_after = ctx.eps_frames;
        q.min_replacement = cfg.L_K;
        q.valid = &ctx.features.valid;
        rep.candidate_count = acceptable_pairs(ws, q).size();
        rep.pair = select(ws, q, obj);
        rep.term_mismatch = rep.pair.duration_mismatch();
        rep.term_borders = cfg.gamma_len * ((rep.d_s - rep.pair.l0) + (rep.pair.k1 - rep.d_e));
        rep.term_weights = cfg.gamma_w * (1.0 / rep.pair.w0 + 1.0 / rep.pair.w1);
        res.timings.transition_selection += now_seconds() - t0;

        t0 = now_seconds();
        rep.plan = make_splice_plan(rep.pair, ctx.hop, ctx.half_window, input.length());
        refine_offsets(rep.plan, ctx.mono.channels.front(), rep.pair, gap);
        rep.output_length = spliced_length(rep.pair, rep.plan, input.length());
        res.timings.signal_reconstruction += now_seconds() - t0;

        res.reduced_graphs.push_back(std::move(ws));
        res.gaps.push_back(std::move(rep));
    }

    // Apply right-to-left so earlier sample indices stay valid.
    const double t0 = now_seconds();
    AudioBuffer out = input;
    for (auto it = res.gaps.rbegin(); it != res.gaps.rend(); ++it)
        out = crossfade_splice(out, it->pair, it->plan);
    res.restored = std::move(out);
    res.timings.signal_reconstruction += now_seconds() - t0;
    return res;
}

GapSpec bench_gap(std::int64_t length, int sample_rate) {
    const std::int64_t start = static_cast<std::int64_t>(0.45 * static_cast<double>(length));
    const std::int64_t end = std::min<std::int64_t>(length, start + 2LL * sample_rate);
    return GapSpec(start, end);
}

namespace {

// Portable uniform integer in [0, n): explicit 128-bit multiply-shift mapping
// of the raw mt19937_64 output, identical across platforms.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t x = rng();
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(n)) >> 64);
}

}  // namespace

VerifyResult run_verify(const AudioBuffer& input, double gap_seconds, int trials,
                        std::uint64_t seed, const AlgoConfig& cfg) {
    cfg.validate();
    input.validate();
    if (trials < 1) throw Error(ErrKind::InvalidArgs, "trials must be >= 1");
    if (gap_seconds < 0) throw Error(ErrKind::InvalidArgs, "gap length must be nonnegative");

    const AudioBuffer mono = downmix_mono(input);
    const int d = decimation_factor(mono.sample_rate, cfg.xi_max);
    const std::int64_t hop = static_cast<std::int64_t>(cfg.a) * d;
    const std::int64_t gap_len =
        static_cast<std::int64_t>(std::llround(gap_seconds * mono.sample_rate));

    VerifyResult out;
    out.seed = seed;
    if (gap_len == 0) {  // degenerate: nothing to conceal
        out.trials.assign(static_cast<std::size_t>(trials), VerifyTrial{0, 0, 0.0, true});
        out.pass = true;
        return out;
    }
    if (mono.length() < gap_len * 2)
        throw Error(ErrKind::SignalTooShort, "input must be at least twice the gap length");

    // Trim to a multiple of the effective hop so the copy period is exactly
    // representable on the frame grid, then double.
    const std::int64_t period = (mono.length() / hop) * hop;
    if (period == 0) throw Error(ErrKind::SignalTooShort, "input shorter than one frame");
    Eigen::VectorXd doubled(2 * period);
    doubled.head(period) = mono.channels.front().head(period);
    doubled.tail(period) = mono.channels.front().head(period);
    const AudioBuffer clean({doubled}, mono.sample_rate);

    const std::int64_t L = clean.length();
    const std::int64_t lo = static_cast<std::int64_t>(0.05 * static_cast<double>(L));
    const std::int64_t hi = static_cast<std::int64_t>(0.95 * static_cast<double>(L)) - gap_len;
    if (hi <= lo) throw Error(ErrKind::SignalTooShort, "no room for the gap placement");

    // A gap covering (or nearly touching) the copy seam has no valid
    // replacement in [s s]: matching it would need a lag beyond the period.
    // Keep one second of clearance so transition rows with twins exist.
    const std::int64_t clearance = mono.sample_rate + gap_len;
    const std::int64_t seam_lo = period - gap_len - clearance;
    const std::int64_t seam_hi = period + clearance;

    if (seam_lo < lo && seam_hi > hi)
        throw Error(ErrKind::SignalTooShort, "seam exclusion leaves no room for the gap");

    std::mt19937_64 rng(seed);
    out.pass = true;
    for (int t = 0; t < trials; ++t) {
        std::int64_t start = 0;
        int guard = 0;
        do {
            if (++guard > 100000) throw Error(ErrKind::Internal, "gap placement did not converge");
            start = lo + static_cast<std::int64_t>(
                             uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
        } while (start > seam_lo && start < seam_hi);

        VerifyTrial trial;
        trial.gap_start = start;
        trial.gap_end = start + gap_len;

        AudioBuffer corrupted = clean;
        corrupted.channels.front().segment(start, gap_len).setZero();

        InpaintResult res =
            run_inpaint(corrupted, {GapSpec(trial.gap_start, trial.gap_end)}, cfg);
        const Eigen::VectorXd& restored = res.restored.channels.front();
        const Eigen::VectorXd& ref = clean.channels.front();

        // Relative l2 error against the uncorrupted double; any length excess
        // on either side counts at full amplitude.
        const Eigen::Index n = std::min<Eigen::Index>(restored.size(), ref.size());
        double num = (restored.head(n) - ref.head(n)).squaredNorm();
        if (restored.size() > n) num += restored.tail(restored.size() - n).squaredNorm();
        if (ref.size() > n) num += ref.tail(ref.size() - n).squaredNorm();
        trial.rel_error = std::sqrt(num / ref.squaredNorm());
        trial.pass = trial.rel_error < 1e-6;
        out.pass = out.pass && trial.pass;
        out.trials.push_back(trial);
    }
    return out;
}

}  // namespace simgap
