#include <doctest.h>

#include <cmath>

#include "simgap/features.hpp"
#include "simgap/pipeline.hpp"
#include "simgap/stft.hpp"
#include "synth.hpp"

using namespace simgap;

namespace {

CoefficientMatrix from_magnitudes(const Eigen::MatrixXd& mags) {
    CoefficientMatrix c;
    c.rows = mags.cast<std::complex<double>>();
    c.params.win_length = 2;
    c.params.hop = 1;
    c.params.channels = static_cast<int>(2 * (mags.rows() - 1));
    c.params.signal_length = mags.cols();
    return c;
}

}  // namespace

TEST_CASE("db feature: peak normalization, clipping boundary, direct values") {
    SUBCASE("single nonzero coefficient") {
        Eigen::MatrixXd mags = Eigen::MatrixXd::Zero(5, 4);
        mags(2, 1) = 1.0;
        const Eigen::MatrixXd f1 = db_feature(from_magnitudes(mags), 50.0);
        CHECK(f1(2, 1) == 1.0);
        CHECK(f1.sum() == 1.0);  // everything else clipped to zero
    }
    SUBCASE("entry exactly t_s dB below the peak clips to zero") {
        Eigen::MatrixXd mags(2, 2);
        const double below = std::pow(10.0, -50.0 / 20.0);
        mags << 1.0, below, below * (1.0 - 1e-9), below * 2.0;
        const Eigen::MatrixXd f1 = db_feature(from_magnitudes(mags), 50.0);
        CHECK(f1(0, 0) == 1.0);
        CHECK(std::abs(f1(0, 1)) <= 1e-12);       // at the boundary
        CHECK(f1(1, 0) == 0.0);                   // strictly below
        CHECK(f1(1, 1) > 0.0);                    // 6 dB above the boundary
    }
    SUBCASE("magnitudes {1, 10^-1.25} with t_s 50 give 0.5") {
        Eigen::MatrixXd mags(1, 2);
        mags << 1.0, std::pow(10.0, -1.25);
        const Eigen::MatrixXd f1 = db_feature(from_magnitudes(mags), 50.0);
        CHECK(f1(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("all-zero magnitudes map to an all-zero F1") {
        const Eigen::MatrixXd f1 = db_feature(from_magnitudes(Eigen::MatrixXd::Zero(4, 4)), 50.0);
        CHECK(f1.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("monotone in the coefficient magnitude") {
        Eigen::MatrixXd mags(2, 2);
        mags << 1.0, 0.02, 0.3, 0.5;
        const Eigen::MatrixXd base = db_feature(from_magnitudes(mags), 50.0);
        for (double bump : {0.05, 0.2, 2.0}) {
            Eigen::MatrixXd upper = mags;
            upper(0, 1) = mags(0, 1) + bump;
            const Eigen::MatrixXd f1 = db_feature(from_magnitudes(upper), 50.0);
            CHECK(f1(0, 1) >= base(0, 1) - 1e-15);
        }
    }
}

TEST_CASE("relative IF: masked where F1 is zero, near zero on channel-centered tones") {
    SUBCASE("mask") {
        Eigen::MatrixXd mags = Eigen::MatrixXd::Zero(3, 3);
        mags(1, 1) = 1.0;
        const CoefficientMatrix c = from_magnitudes(mags);
        CoefficientMatrix c_td = c;
        c_td.rows.setConstant(std::complex<double>(0.3, 0.8));
        c_td.kind = CoefficientMatrix::Kind::TimeDerivativeWindow;
        const Eigen::MatrixXd f1 = db_feature(c, 50.0);
        const Eigen::MatrixXd f2 = relative_if_feature(c, c_td, f1, 1);
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n)
                if (f1(m, n) == 0.0) CHECK(f2(m, n) == 0.0);
    }

    SUBCASE("channel-centered tone: interior relative IF below 1e-6") {
        const int lw = 1024, hop = 128, M = 1024;
        const int m0 = 100;
        const Eigen::Index len = 64 * hop;
        Eigen::VectorXd x(len);
        for (Eigen::Index l = 0; l < len; ++l)
            x(l) = 0.5 * std::cos(2.0 * M_PI * m0 * static_cast<double>(l) / M);
        StftParams p;
        p.win_length = lw;
        p.hop = hop;
        p.channels = M;
        p.signal_length = len;
        const Eigen::VectorXd g = itersine_window(lw);
        const CoefficientMatrix c = stft(x, p, g);
        const CoefficientMatrix c_td =
            stft(x, p, derivative_window(g), CoefficientMatrix::Kind::TimeDerivativeWindow);
        // raw ratio at the tone bin, interior frames only
        for (Eigen::Index n = 10; n < 54; ++n) {
            const std::complex<double> ratio = c_td.rows(m0, n) / c.rows(m0, n);
            CHECK(std::abs(ratio.imag()) < 1e-6);
        }
    }

    SUBCASE("linear chirp flips the sign of F2 across the crossing frame") {
        const int lw = 256, hop = 32, M = 256;
        const Eigen::Index len = 96 * hop;
        // sweep slowly through channel m0
        const int m0 = 40;
        Eigen::VectorXd x(len);
        const double f_lo = (m0 - 0.5) / M, f_hi = (m0 + 0.5) / M;
        for (Eigen::Index l = 0; l < len; ++l) {
            const double u = static_cast<double>(l) / static_cast<double>(len);
            const double phase =
                2.0 * M_PI * static_cast<double>(l) * (f_lo + 0.5 * (f_hi - f_lo) * u);
            x(l) = std::sin(phase);
        }
        StftParams p;
        p.win_length = lw;
        p.hop = hop;
        p.channels = M;
        p.signal_length = len;
        const Eigen::VectorXd g = itersine_window(lw);
        const CoefficientMatrix c = stft(x, p, g);
        const CoefficientMatrix c_td =
            stft(x, p, derivative_window(g), CoefficientMatrix::Kind::TimeDerivativeWindow);
        const Eigen::MatrixXd f1 = db_feature(c, 50.0);
        const Eigen::MatrixXd f2 = relative_if_feature(c, c_td, f1, 8);
        // early frames sit below the bin center, late frames above it
        const double early = f2(m0, 20);
        const double late = f2(m0, 70);
        CHECK(early * late < 0.0);
    }
}

TEST_CASE("assemble: lambda scaling and distances") {
    Eigen::MatrixXd f1(3, 3), f2(3, 3);
    f1 << 1.0, 0.5, 1.0, 0.25, 0.0, 0.25, 0.0, 0.75, 0.0;
    f2 << 0.0, 0.4, 0.0, -0.5, 0.25, -0.5, 0.125, 1.0, 0.125;

    SUBCASE("stored F2 entries carry the lambda factor") {
        const FeatureMatrix fm = assemble(f1, f2, 1.5, 10.0, 4);
        CHECK(fm.f2_scaled(0, 1) == doctest::Approx(0.6).epsilon(1e-15));
    }
    SUBCASE("lambda zero reduces distances to spectrogram distances") {
        const FeatureMatrix fm = assemble(f1, f2, 0.0, 10.0, 4);
        double want = 0.0;
        for (int m = 0; m < 3; ++m) {
            const double w = (m == 0 || m == 2) ? 1.0 : 2.0;
            want += w * (f1(m, 0) - f1(m, 1)) * (f1(m, 0) - f1(m, 1));
        }
        CHECK(fm.squared_distance(0, 1) == doctest::Approx(want).epsilon(1e-14));
    }
    SUBCASE("identical columns are at distance zero") {
        const FeatureMatrix fm = assemble(f1, f2, 1.5, 10.0, 4);
        CHECK(fm.squared_distance(0, 2) == 0.0);
    }
    SUBCASE("full column expands mirrors with the sign flip on F2") {
        const FeatureMatrix fm = assemble(f1, f2, 2.0, 10.0, 4);
        const Eigen::VectorXd col = fm.full_column(1);
        REQUIRE(col.size() == 8);
        CHECK(col(0) == f1(0, 1));
        CHECK(col(1) == f1(1, 1));
        CHECK(col(2) == f1(2, 1));
        CHECK(col(3) == f1(1, 1));           // mirror of channel 1
        CHECK(col(4 + 3) == -2.0 * f2(1, 1));  // mirrored F2 flips sign
        // full-vector distance equals the weighted stored distance
        double direct = 0.0;
        const Eigen::VectorXd a = fm.full_column(0), b = fm.full_column(1);
        for (int i = 0; i < 8; ++i) direct += (a(i) - b(i)) * (a(i) - b(i));
        CHECK(fm.squared_distance(0, 1) == doctest::Approx(direct).epsilon(1e-13));
    }
    SUBCASE("dimension mismatch throws") {
        CHECK_THROWS_AS(assemble(f1, f2.leftCols(2), 1.0, 10.0, 4), Error);
    }
}

TEST_CASE("invalidate_gap marks exactly the frames whose window meets the gap") {
    const auto make_fm = [](Eigen::Index n_frames) {
        return assemble(Eigen::MatrixXd::Ones(3, n_frames), Eigen::MatrixXd::Zero(3, n_frames),
                        1.5, 86.13, 4);
    };
    const std::int64_t hop = 512, half = 2048, len = 512 * 2000;

    SUBCASE("tiny gap at the signal start only reaches half a window") {
        FeatureMatrix fm = make_fm(2000);
        invalidate_gap(fm, GapSpec(0, 1), hop, half, len);
        for (Eigen::Index n = 0; n < 2000; ++n) {
            const bool should_hit = n * hop - half <= 0 && n * hop + half >= 0;
            CHECK(fm.valid[static_cast<std::size_t>(n)] == (should_hit ? 0 : 1));
        }
        // exactly 5 frames: centers 0,512,...,2048
        Eigen::Index count = 0;
        for (char v : fm.valid) count += v ? 0 : 1;
        CHECK(count == 5);
    }

    SUBCASE("2 s gap at 44.1 kHz defaults invalidates the enumerated frame count") {
        FeatureMatrix fm = make_fm(2000);
        const std::int64_t start = 300001, end = start + 88200;
        invalidate_gap(fm, GapSpec(start, end), hop, half, len);
        Eigen::Index count = 0;
        for (Eigen::Index n = 0; n < 2000; ++n) {
            const bool hit = n * hop + half >= start && n * hop - half <= end - 1;
            CHECK(fm.valid[static_cast<std::size_t>(n)] == (hit ? 0 : 1));
            count += hit ? 1 : 0;
        }
        // ~ ceil(2s * 86.13) + 2*ceil((L_w/2)/a) = 173 + 8
        CHECK(count >= 180);
        CHECK(count <= 182);
        // invalid frames carry zero features
        for (Eigen::Index n = 0; n < 2000; ++n)
            if (!fm.valid[static_cast<std::size_t>(n)]) CHECK(fm.f1.col(n).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("gap beyond the signal throws") {
        FeatureMatrix fm = make_fm(10);
        CHECK_THROWS_AS(invalidate_gap(fm, GapSpec(0, len + 1), hop, half, len), Error);
    }
}

TEST_CASE("feature matrix is invariant under global amplitude scaling") {
    const int rate = 8000;
    const Eigen::VectorXd x = synth::tone_mixture(4.0, rate, 21);
    AlgoConfig cfg;
    const AudioBuffer buf({x}, rate);

    const AnalysisContext base = analyze_signal(buf, {}, cfg);
    for (double alpha : {2.0, 1.7}) {
        const AudioBuffer scaled({alpha * x}, rate);
        const AnalysisContext other = analyze_signal(scaled, {}, cfg);
        CHECK((other.features.f1 - base.features.f1).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((other.features.f2_scaled - base.features.f2_scaled).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("F1 locality: perturbations outside a frame's window support do not move it") {
    const int rate = 8000;
    Eigen::VectorXd x = synth::tone_mixture(3.0, rate, 33);
    AlgoConfig cfg;
    const AnalysisContext base = analyze_signal(AudioBuffer({x}, rate), {}, cfg);

    // replace half a second far to the right with different content, quieter
    // than the global peak so the normalizer cannot move
    Eigen::VectorXd y = x;
    const Eigen::Index from = 2 * rate;
    y.segment(from, rate / 2) = 0.2 * synth::white_noise(rate / 2, 77);
    const AnalysisContext pert = analyze_signal(AudioBuffer({y}, rate), {}, cfg);

    // frames whose window [n*a - L_w/2, n*a + L_w/2) stays left of the change
    const Eigen::Index safe_frames = (from - cfg.L_w / 2) / cfg.a;
    bool f1_equal = true;
    for (Eigen::Index n = 0; n < std::min<Eigen::Index>(safe_frames, base.features.frames()); ++n)
        f1_equal = f1_equal && (pert.features.f1.col(n) - base.features.f1.col(n))
                                       .cwiseAbs()
                                       .maxCoeff() == 0.0;
    CHECK(f1_equal);
}
