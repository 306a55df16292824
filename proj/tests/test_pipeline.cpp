#include <doctest.h>

#include <cmath>

#include "simgap/exports.hpp"
#include "simgap/pipeline.hpp"
#include "synth.hpp"

using namespace simgap;

namespace {

AlgoConfig fast_cfg() {
    AlgoConfig cfg;  // defaults; 8 kHz inputs skip decimation entirely
    return cfg;
}

// Doubled fixture with a zeroed gap, plus the clean reference.
struct RepetitionCase {
    AudioBuffer corrupted;
    Eigen::VectorXd clean;
    GapSpec gap{0, 1};
};

RepetitionCase repetition_case(double half_seconds, int rate, std::uint64_t seed,
                               double gap_atit, double gap_seconds) {
    const Eigen::VectorXd base = synth::tone_mixture(half_seconds, rate, seed);
    const std::int64_t period = (base.size() / 128) * 128;
    Eigen::VectorXd doubled(2 * period);
    doubled.head(period) = base.head(period);
    doubled.tail(period) = base.head(period);

    RepetitionCase rc;
    rc.clean = doubled;
    const auto start = static_cast<std::int64_t>(gap_at * doubled.size());
    const auto len = static_cast<std::int64_t>(gap_seconds * rate);
    rc.gap = GapSpec(start, start + len);
    Eigen::VectorXd corrupted = doubled;
    corrupted.segment(rc.gap.start_sample, len).setZero();
    rc.corrupted = AudioBuffer({corrupted}, rate);
    (void)gap_at;
    return rc;
}

double rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::Index n = std::min(a.size(), b.size());
    double num = (a.head(n) - b.head(n)).squaredNorm();
    if (a.size() > n) num += a.tail(a.size() - n).squaredNorm();
    if (b.size() > n) num += b.tail(b.size() - n).squaredNorm();
    return std::sqrt(num / b.squaredNorm());
}

}  // namespace

TEST_CASE("end to end: a doubled signal with a gap in the second copy is restored exactly") {
    const int rate = 8000;
    const RepetitionCase rc = repetition_case(8.0, rate, 2024, 0.7, 1.0);
    const InpaintResult res = run_inpaint(rc.corrupted, {rc.gap}, fast_cfg());

    CHECK(rel_error(res.restored.channels[0], rc.clean) < 1e-6);
    REQUIRE(res.gaps.size() == 1);
    CHECK(res.gaps[0].pair.duration_mismatch() == 0);
    CHECK(res.gaps[0].pair.w0 >= 2.0);
    CHECK(res.gaps[0].pair.w1 >= 2.0);
    // the selected lag is the repetition period
    const std::int64_t period = rc.clean.size() / 2;
    CHECK(std::abs((res.gaps[0].pair.l0 - res.gaps[0].pair.k0) * 128 - period) <= 128);
}

TEST_CASE("end to end: gap in the first copy pulls the replacement from the second") {
    const int rate = 8000;
    const RepetitionCase rc = repetition_case(8.0, rate, 77, 0.25, 1.0);
    const InpaintResult res = run_inpaint(rc.corrupted, {rc.gap}, fast_cfg());
    CHECK(rel_error(res.restored.channels[0], rc.clean) < 1e-6);
    CHECK(res.gaps[0].pair.k0 > res.gaps[0].pair.l0);  // replacement comes later
}

TEST_CASE("white noise has no persistent similarity: NoTransitionFound") {
    const int rate = 8000;
    Eigen::VectorXd x = synth::white_noise(16 * rate, 424242, 0.5);
    const GapSpec gap(8 * rate, 9 * rate);
    Eigen::VectorXd corrupted = x;
    corrupted.segment(gap.start_sample, rate).setZero();
    const AudioBuffer buf({corrupted}, rate);

    // the reduced graph on noise must stay empty (or at least weak) at t_w = 2
    AnalysisContext ctx = analyze_signal(buf, {gap}, fast_cfg());
    GraphParams gp = graph_params(fast_cfg(), ctx);
    bool no_transition = false;
    try {
        const SparseWeights ws =
            reduced_graph(ctx.features, gap.frame_start(ctx.hop), gap.frame_end(ctx.hop), gp);
        for (const auto& e : ws.entries) CHECK(e.weight < 2.5);
        run_inpaint(buf, {gap}, fast_cfg());
    } catch (const Error& e) {
        no_transition = e.kind() == ErrKind::NoTransitionFound;
    }
    CHECK(no_transition);
}

TEST_CASE("config json round-trips and rejects junk") {
    AlgoConfig cfg;
    cfg.K = 17;
    cfg.t_w = 2.5;
    cfg.knn_mode = "approx";
    const std::string text = config_to_json(cfg);
    const AlgoConfig back = config_from_json(text);
    CHECK(config_to_json(back) == text);
    CHECK(back.K == 17);
    CHECK(back.t_w == 2.5);
    CHECK(back.approx_knn());

    CHECK_THROWS_AS(config_from_json("{\"nope\": 1}"), Error);
    CHECK_THROWS_AS(config_from_json("not json"), Error);
    CHECK_THROWS_AS(config_from_json("{\"K\": 0}"), Error);
    CHECK_THROWS_AS(config_from_json("{\"L_w\": 1000}"), Error);  // breaks L_w/(2a)
}

TEST_CASE("identical runs produce bit-identical output and reports") {
    const int rate = 8000;
    const RepetitionCase rc = repetition_case(6.0, rate, 5150, 0.65, 0.8);
    const InpaintResult a = run_inpaint(rc.corrupted, {rc.gap}, fast_cfg());
    const InpaintResult b = run_inpaint(rc.corrupted, {rc.gap}, fast_cfg());

    REQUIRE(a.restored.length() == b.restored.length());
    CHECK((a.restored.channels[0] - b.restored.channels[0]).cwiseAbs().maxCoeff() == 0.0);
    const std::string ra =
        inpaint_report_json("in.wav", "out.wav", rc.corrupted, fast_cfg(), a);
    const std::string rb =
        inpaint_report_json("in.wav", "out.wav", rc.corrupted, fast_cfg(), b);
    CHECK(ra == rb);
}

TEST_CASE("cached features equal a fresh recomputation bit for bit") {
    const int rate = 8000;
    const RepetitionCase rc = repetition_case(6.0, rate, 31337, 0.7, 0.8);
    const AnalysisContext c1 = analyze_signal(rc.corrupted, {rc.gap}, fast_cfg());
    const AnalysisContext c2 = analyze_signal(rc.corrupted, {rc.gap}, fast_cfg());
    CHECK((c1.features.f1 - c2.features.f1).cwiseAbs().maxCoeff() == 0.0);
    CHECK((c1.features.f2_scaled - c2.features.f2_scaled).cwiseAbs().maxCoeff() == 0.0);
    CHECK(c1.features.valid == c2.features.valid);
}

TEST_CASE("multi-gap: increasing order, disjointness, shared mask") {
    const int rate = 8000;
    const Eigen::VectorXd base = synth::tone_mixture(10.0, rate, 808);
    const std::int64_t period = (base.size() / 128) * 128;
    Eigen::VectorXd doubled(2 * period);
    doubled.head(period) = base.head(period);
    doubled.tail(period) = base.head(period);

    const GapSpec g1(static_cast<std::int64_t>(1.20 * period), static_cast<std::int64_t>(1.25 * period));
    const GapSpec g2(static_cast<std::int64_t>(1.60 * period), static_cast<std::int64_t>(1.65 * period));
    Eigen::VectorXd corrupted = doubled;
    corrupted.segment(g1.start_sample, g1.end_sample - g1.start_sample).setZero();
    corrupted.segment(g2.start_sample, g2.end_sample - g2.start_sample).setZero();
    const AudioBuffer buf({corrupted}, rate);

    // order given reversed on purpose; pipeline sorts
    const InpaintResult res = run_inpaint(buf, {g2, g1}, fast_cfg());
    REQUIRE(res.gaps.size() == 2);
    CHECK(res.gaps[0].gap.start_sample == g1.start_sample);
    CHECK(res.gaps[1].gap.start_sample == g2.start_sample);
    CHECK(rel_error(res.restored.channels[0], doubled) < 1e-6);

    SUBCASE("overlapping gaps are rejected") {
        CHECK_THROWS_AS(
            run_inpaint(buf, {GapSpec(1000, 3000), GapSpec(2000, 4000)}, fast_cfg()), Error);
    }
    SUBCASE("empty gap list is rejected") {
        CHECK_THROWS_AS(run_inpaint(buf, {}, fast_cfg()), Error);
    }
}

TEST_CASE("verify protocol: degenerate gap, determinism, desk-scale pass") {
    const int rate = 8000;
    const Eigen::VectorXd base = synth::tone_mixture(6.0, rate, 6001);
    const AudioBuffer buf({base}, rate);

    SUBCASE("zero-length gap passes trivially") {
        const VerifyResult r = run_verify(buf, 0.0, 3, 42, fast_cfg());
        CHECK(r.pass);
        CHECK(r.trials.size() == 3);
        for (const auto& t : r.trials) CHECK(t.rel_error == 0.0);
    }
    SUBCASE("same seed, same gaps, same errors") {
        const VerifyResult a = run_verify(buf, 0.5, 2, 99, fast_cfg());
        const VerifyResult b = run_verify(buf, 0.5, 2, 99, fast_cfg());
        REQUIRE(a.trials.size() == b.trials.size());
        for (std::size_t i = 0; i < a.trials.size(); ++i) {
            CHECK(a.trials[i].gap_start == b.trials[i].gap_start);
            CHECK(a.trials[i].rel_error == b.trials[i].rel_error);
        }
    }
    SUBCASE("desk-scale verification passes") {
        const VerifyResult r = run_verify(buf, 0.5, 2, 7, fast_cfg());
        for (const auto& t : r.trials) CHECK(t.rel_error < 1e-6);
        CHECK(r.pass);
    }
    SUBCASE("too short input throws SignalTooShort") {
        const AudioBuffer tiny({synth::tone(rate / 2, 440.0, rate)}, rate);
        CHECK_THROWS_AS(run_verify(tiny, 2.0, 1, 1, fast_cfg()), Error);
    }
}

TEST_CASE("approximate knn mode runs the pipeline end to end") {
    const int rate = 8000;
    const RepetitionCase rc = repetition_case(6.0, rate, 2525, 0.7, 0.6);
    AlgoConfig cfg = fast_cfg();
    cfg.knn_mode = "approx";
    const InpaintResult res = run_inpaint(rc.corrupted, {rc.gap}, cfg);
    // the exact twin is found even by the screened search
    CHECK(rel_error(res.restored.channels[0], rc.clean) < 1e-6);
}

TEST_CASE("gap validation errors carry the right exit codes") {
    const int rate = 8000;
    const AudioBuffer buf({synth::tone(4 * rate, 440.0, rate)}, rate);
    try {
        run_inpaint(buf, {GapSpec(1000, 8 * rate)}, fast_cfg());
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrKind::GapOutOfBounds);
        CHECK(e.exit_code() == 2);
    }
}
