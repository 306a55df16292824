// simgap - conceal long gaps in audio by splicing in a similar segment found
// through a time-persistent spectral-similarity graph.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simgap/exports.hpp"
#include "simgap/pipeline.hpp"
#include "simgap/wav.hpp"

namespace {

using namespace simgap;

struct GapArgs {
    std::vector<double> start_s, end_s;
    std::vector<std::int64_t> start_n, end_n;
};

std::vector<GapSpec> resolve_gaps(const GapArgs& g, int sample_rate) {
    const bool secs = !g.start_s.empty() || !g.end_s.empty();
    const bool samp = !g.start_n.empty() || !g.end_n.empty();
    if (secs && samp)
        throw Error(ErrKind::InvalidArgs, "use either second-based or sample-based gap flags");
    if (!secs && !samp) throw Error(ErrKind::InvalidArgs, "no gap specified");

    std::vector<GapSpec> gaps;
    if (secs) {
        if (g.start_s.size() != g.end_s.size())
            throw Error(ErrKind::InvalidArgs, "gap-start/gap-end counts differ");
        for (std::size_t i = 0; i < g.start_s.size(); ++i) {
            const auto s = static_cast<std::int64_t>(std::llround(g.start_s[i] * sample_rate));
            const auto e = static_cast<std::int64_t>(std::llround(g.end_s[i] * sample_rate));
            if (s < 0 || e <= s) throw Error(ErrKind::InvalidGap, "gap end must exceed gap start");
            gaps.emplace_back(s, e);
        }
    } else {
        if (g.start_n.size() != g.end_n.size())
            throw Error(ErrKind::InvalidArgs, "gap-start/gap-end counts differ");
        for (std::size_t i = 0; i < g.start_n.size(); ++i) {
            if (g.start_n[i] < 0 || g.end_n[i] <= g.start_n[i])
                throw Error(ErrKind::InvalidGap, "gap end must exceed gap start");
            gaps.emplace_back(g.start_n[i], g.end_n[i]);
        }
    }
    return gaps;
}

void print_timings(const StageTimings& t) {
    std::printf("stage timings [s]:\n");
    std::printf("  feature extraction    %9.3f\n", t.feature_extraction);
    std::printf("  graph construction    %9.3f\n", t.graph_construction);
    std::printf("  transition selection  %9.3f\n", t.transition_selection);
    std::printf("  signal reconstruction %9.3f\n", t.signal_reconstruction);
    std::printf("  total                 %9.3f\n", t.total());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw Error(ErrKind::IoError, "cannot open " + path + " for writing");
    out << text;
    if (!out) throw Error(ErrKind::IoError, "write failure on " + path);
}

int cmd_inpaint(const std::string& input, const std::string& output, const GapArgs& gap_args,
                const std::string& config_path, const std::string& export_graph,
                const std::string& report_path) {
    AlgoConfig cfg = config_path.empty() ? AlgoConfig{} : load_config_file(config_path);
    cfg.validate();

    WavFile wav = read_wav(input);
    const std::vector<GapSpec> gaps = resolve_gaps(gap_args, wav.format.sample_rate);

    InpaintResult res = run_inpaint(wav.buffer, gaps, cfg);
    write_wav(output, res.restored, wav.format);

    if (!export_graph.empty()) {
        for (std::size_t i = 0; i < res.reduced_graphs.size(); ++i) {
            std::string path = export_graph;
            if (res.reduced_graphs.size() > 1) path += "." + std::to_string(i);
            export_edges(path, res.reduced_graphs[i]);
        }
    }
    if (!report_path.empty())
        write_text(report_path, inpaint_report_json(input, output, wav.buffer, cfg, res));

    for (const auto& g : res.gaps) {
        std::printf("gap [%" PRId64 ", %" PRId64 "): pair (l0=%d,k0=%d),(l1=%d,k1=%d)"
                    " objective %.6g (mismatch %g, borders %g, weights %.6g)\n",
                    g.gap.start_sample, g.gap.end_sample, g.pair.l0, g.pair.k0, g.pair.l1,
                    g.pair.k1, g.pair.objective_value, g.term_mismatch, g.term_borders,
                    g.term_weights);
        std::printf("  refined cuts: %" PRId64 " -> %" PRId64 " (samples), candidates %zu\n",
                    g.plan.cut_start, g.plan.cut_end, g.candidate_count);
    }
    print_timings(res.timings);
    return 0;
}

int cmd_analyze(const std::string& input, const std::string& stage, bool full,
                const GapArgs& gap_args, const std::string& export_path,
                const std::string& config_path, const std::string& f1_path,
                const std::string& f2_path) {
    AlgoConfig cfg = config_path.empty() ? AlgoConfig{} : load_config_file(config_path);
    cfg.validate();
    if (stage != "w0" && stage != "w" && stage != "ws")
        throw Error(ErrKind::InvalidArgs, "stage must be one of w0|w|ws");

    WavFile wav = read_wav(input);
    const bool has_gap = !gap_args.start_s.empty() || !gap_args.start_n.empty();
    std::vector<GapSpec> gaps;
    if (has_gap) gaps = resolve_gaps(gap_args, wav.format.sample_rate);
    if (!full && !has_gap)
        throw Error(ErrKind::InvalidArgs,
                    "reduced analysis needs a gap; pass --gap-start/--gap-end or use --full");

    AnalysisContext ctx = analyze_signal(wav.buffer, gaps, cfg);
    if (!f1_path.empty()) export_feature_csv(f1_path, ctx.features, FeatureKind::F1);
    if (!f2_path.empty()) export_feature_csv(f2_path, ctx.features, FeatureKind::F2);

    GraphStages stages;
    if (full) {
        stages = full_graph_stages(ctx.features, graph_params(cfg, ctx));
    } else {
        const int d_s = gaps.front().frame_start(ctx.hop);
        const int d_e = gaps.front().frame_end(ctx.hop);
        stages = reduced_graph_stages(ctx.features, d_s, d_e, graph_params(cfg, ctx));
    }
    const SparseWeights& w =
        stage == "w0" ? stages.w0 : stage == "w" ? stages.w : stages.ws;
    export_edges(export_path, w);
    std::printf("%s: %zu edges (sigma %.6g)\n", stage.c_str(), w.entries.size(), stages.sigma);
    return 0;
}

int cmd_verify(const std::string& input, double gap_length, int trials, std::uint64_t seed,
               const std::string& config_path, const std::string& report_path) {
    AlgoConfig cfg = config_path.empty() ? AlgoConfig{} : load_config_file(config_path);
    cfg.validate();
    WavFile wav = read_wav(input);
    VerifyResult res = run_verify(wav.buffer, gap_length, trials, seed, cfg);
    for (std::size_t i = 0; i < res.trials.size(); ++i) {
        const auto& t = res.trials[i];
        std::printf("trial %zu: gap [%" PRId64 ", %" PRId64 ") rel_error %.3e %s\n", i + 1,
                    t.gap_start, t.gap_end, t.rel_error, t.pass ? "PASS" : "FAIL");
    }
    std::printf("seed %" PRIu64 ": %s\n", res.seed, res.pass ? "PASS" : "FAIL");
    if (!report_path.empty())
        write_text(report_path, verify_report_json(input, gap_length, cfg, res));
    return res.pass ? 0 : 1;
}

int cmd_bench(const std::vector<std::string>& inputs, int reps, const std::string& config_path) {
    AlgoConfig cfg = config_path.empty() ? AlgoConfig{} : load_config_file(config_path);
    cfg.validate();
    if (reps < 1) throw Error(ErrKind::InvalidArgs, "reps must be >= 1");

    struct Row {
        double minutes = 0;
        std::vector<StageTimings> runs;
    };
    std::vector<Row> rows;

    for (const auto& path : inputs) {
        WavFile wav = read_wav(path);
        Row row;
        row.minutes = static_cast<double>(wav.buffer.length()) / wav.format.sample_rate / 60.0;
        const GapSpec gap = bench_gap(wav.buffer.length(), wav.format.sample_rate);
        AudioBuffer corrupted = wav.buffer;
        for (auto& ch : corrupted.channels)
            ch.segment(gap.start_sample, gap.end_sample - gap.start_sample).setZero();
        for (int rep = 0; rep < reps; ++rep) {
            InpaintResult res = run_inpaint(corrupted, {gap}, cfg);
            row.runs.push_back(res.timings);
        }
        rows.push_back(std::move(row));

        const auto stat = [&](auto get) {
            double mean = 0, var = 0;
            for (const auto& r : rows.back().runs) mean += get(r) / rows.back().minutes;
            mean /= reps;
            for (const auto& r : rows.back().runs) {
                const double d = get(r) / rows.back().minutes - mean;
                var += d * d;
            }
            const double sd = reps > 1 ? std::sqrt(var / (reps - 1)) : 0.0;
            return std::pair(mean, sd);
        };
        std::printf("%s (%.2f min, %d reps) seconds per minute of audio:\n", path.c_str(),
                    rows.back().minutes, reps);
        auto p = stat([](const StageTimings& t) { return t.feature_extraction; });
        std::printf("  Feature extraction    %8.3f +- %.3f\n", p.first, p.second);
        p = stat([](const StageTimings& t) { return t.graph_construction; });
        std::printf("  Graph construction    %8.3f +- %.3f\n", p.first, p.second);
        p = stat([](const StageTimings& t) { return t.transition_selection; });
        std::printf("  Transition selection  %8.3f +- %.3f\n", p.first, p.second);
        p = stat([](const StageTimings& t) { return t.signal_reconstruction; });
        std::printf("  Signal reconstruction %8.3f +- %.3f\n", p.first, p.second);
        p = stat([](const StageTimings& t) { return t.total(); });
        std::printf("  Total                 %8.3f +- %.3f\n", p.first, p.second);
    }

    if (rows.size() >= 2) {
        // least-squares fit of mean total time against duration
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        const double n = static_cast<double>(rows.size());
        for (const auto& row : rows) {
            double total = 0;
            for (const auto& r : row.runs) total += r.total();
            total /= static_cast<double>(row.runs.size());
            sx += row.minutes;
            sy += total;
            sxx += row.minutes * row.minutes;
            sxy += row.minutes * total;
            syy += total * total;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double denom = (n * sxx - sx * sx) * (n * syy - sy * sy);
        const double r2 = denom > 0 ? (n * sxy - sx * sy) * (n * sxy - sx * sy) / denom : 1.0;
        std::printf("linear fit: total ~ %.3f s/min (R^2 %.4f)\n", slope, r2);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"audio gap concealment via time-persistent similarity graphs"};
    app.require_subcommand(1);

    // inpaint
    auto* in_cmd = app.add_subcommand("inpaint", "conceal a gap and write the restored file");
    std::string in_input, in_output, in_config, in_export_graph, in_report;
    GapArgs in_gaps;
    in_cmd->add_option("--input", in_input, "input WAV")->required();
    in_cmd->add_option("--output", in_output, "restored WAV")->required();
    in_cmd->add_option("--gap-start", in_gaps.start_s, "gap start, seconds (repeatable)");
    in_cmd->add_option("--gap-end", in_gaps.end_s, "gap end, seconds (repeatable)");
    in_cmd->add_option("--gap-start-samples", in_gaps.start_n, "gap start, samples (repeatable)");
    in_cmd->add_option("--gap-end-samples", in_gaps.end_n, "gap end, samples (repeatable)");
    in_cmd->add_option("--config", in_config, "JSON config file");
    in_cmd->add_option("--export-graph", in_export_graph, "write the reduced Ws edge list CSV");
    in_cmd->add_option("--report", in_report, "write a JSON report");

    // analyze
    auto* an_cmd = app.add_subcommand("analyze", "export a similarity-graph stage as CSV");
    std::string an_input, an_stage, an_export, an_config, an_f1, an_f2;
    bool an_full = false;
    GapArgs an_gaps;
    an_cmd->add_option("--input", an_input, "input WAV")->required();
    an_cmd->add_option("--stage", an_stage, "w0|w|ws")->required();
    an_cmd->add_option("--export", an_export, "edge list CSV path")->required();
    an_cmd->add_flag("--full", an_full, "whole-song graph (slow; O(N log N) build)");
    an_cmd->add_option("--gap-start", an_gaps.start_s, "gap start, seconds (reduced variant)");
    an_cmd->add_option("--gap-end", an_gaps.end_s, "gap end, seconds (reduced variant)");
    an_cmd->add_option("--gap-start-samples", an_gaps.start_n, "gap start, samples");
    an_cmd->add_option("--gap-end-samples", an_gaps.end_n, "gap end, samples");
    an_cmd->add_option("--config", an_config, "JSON config file");
    an_cmd->add_option("--export-f1", an_f1, "write the F1 feature matrix CSV");
    an_cmd->add_option("--export-f2", an_f2, "write the F2 feature matrix CSV");

    // verify
    auto* ve_cmd = app.add_subcommand("verify", "perfect-recovery check on a doubled signal");
    std::string ve_input, ve_config, ve_report;
    double ve_gap = 2.0;
    int ve_trials = 5;
    std::uint64_t ve_seed = 1;
    ve_cmd->add_option("--input", ve_input, "input WAV")->required();
    ve_cmd->add_option("--gap-length", ve_gap, "gap length, seconds")->required();
    ve_cmd->add_option("--trials", ve_trials, "number of seeded trials")->required();
    ve_cmd->add_option("--seed", ve_seed, "RNG seed")->required();
    ve_cmd->add_option("--config", ve_config, "JSON config file");
    ve_cmd->add_option("--report", ve_report, "write a JSON summary");

    // bench
    auto* be_cmd = app.add_subcommand("bench", "per-stage timing per minute of audio");
    std::vector<std::string> be_inputs;
    int be_reps = 1;
    std::string be_config;
    be_cmd->add_option("--input", be_inputs, "input WAV (repeatable)")->required();
    be_cmd->add_option("--reps", be_reps, "repetitions per input");
    be_cmd->add_option("--config", be_config, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (in_cmd->parsed())
            return cmd_inpaint(in_input, in_output, in_gaps, in_config, in_export_graph,
                               in_report);
        if (an_cmd->parsed())
            return cmd_analyze(an_input, an_stage, an_full, an_gaps, an_export, an_config, an_f1,
                               an_f2);
        if (ve_cmd->parsed())
            return cmd_verify(ve_input, ve_gap, ve_trials, ve_seed, ve_config, ve_report);
        if (be_cmd->parsed()) return cmd_bench(be_inputs, be_reps, be_config);
    } catch (const simgap::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
    return 2;
}
