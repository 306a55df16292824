#include "simgap/exports.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace simgap {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* stage_name(SparseWeights::Stage s) {
    switch (s) {
        case SparseWeights::Stage::W0: return "w0";
        case SparseWeights::Stage::W: return "w";
        case SparseWeights::Stage::Ws: return "ws";
    }
    return "?";
}

}  // namespace

void export_edges(const std::string& path, const SparseWeights& weights) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrKind::IoError, "cannot open " + path + " for writing");
    out << "# stage=" << stage_name(weights.stage) << " n=" << weights.dims << "\n";
    out << "l,k,weight\n";
    for (const auto& e : weights.entries)
        out << e.l << "," << e.k << "," << fmt_double(e.weight) << "\n";
    if (!out) throw Error(ErrKind::IoError, "write failure on " + path);
}

void export_feature_csv(const std::string& path, const FeatureMatrix& fm, FeatureKind kind) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrKind::IoError, "cannot open " + path + " for writing");
    const int M = fm.channels;
    const Eigen::Index N = fm.frames();
    for (int m = 0; m < M; ++m) {
        const int src = m <= M / 2 ? m : M - m;
        const double sign = (kind == FeatureKind::F2 && m > M / 2) ? -1.0 : 1.0;
        for (Eigen::Index n = 0; n < N; ++n) {
            const double v = kind == FeatureKind::F1 ? fm.f1(src, n)
                                                     : sign * fm.f2_scaled(src, n) / fm.lambda;
            out << fmt_double(v);
            out << (n + 1 < N ? ',' : '\n');
        }
    }
    if (!out) throw Error(ErrKind::IoError, "write failure on " + path);
}

std::string inpaint_report_json(const std::string& input_path, const std::string& output_path,
                                const AudioBuffer& input, const AlgoConfig& cfg,
                                const InpaintResult& result) {
    json j;
    j["schema_version"] = 1;
    j["input"] = input_path;
    j["output"] = output_path;
    j["sample_rate"] = input.sample_rate;
    j["channels"] = input.channel_count();
    j["input_length"] = static_cast<std::int64_t>(input.length());
    j["config"] = json::parse(config_to_json(cfg));

    json gaps = json::array();
    const double rate = input.sample_rate;
    for (const auto& g : result.gaps) {
        json item;
        item["gap_start_sample"] = g.gap.start_sample;
        item["gap_end_sample"] = g.gap.end_sample;
        item["gap_start_seconds"] = g.gap.start_sample / rate;
        item["gap_end_seconds"] = g.gap.end_sample / rate;
        item["frame_start"] = g.d_s;
        item["frame_end"] = g.d_e;
        item["candidate_count"] = g.candidate_count;
        item["pair"] = {{"l0", g.pair.l0}, {"k0", g.pair.k0},
                        {"l1", g.pair.l1}, {"k1", g.pair.k1},
                        {"w0", g.pair.w0}, {"w1", g.pair.w1}};
        item["objective"] = {{"total", g.pair.objective_value},
                             {"duration_mismatch", g.term_mismatch},
                             {"border_distance", g.term_borders},
                             {"inverse_weights", g.term_weights}};
        item["refined"] = {{"cut_start_sample", g.plan.cut_start},
                           {"cut_end_sample", g.plan.cut_end},
                           {"cut_start_seconds", g.plan.cut_start / rate},
                           {"cut_end_seconds", g.plan.cut_end / rate}};
        item["crossfade"] = {
            {"half_window_samples", g.plan.half_window},
            {"region1_start", g.pair.l0 * g.plan.hop - g.plan.half_window},
            {"region1_end", (g.pair.l0 - 1) * g.plan.hop + g.plan.half_window},
            {"region2_start",
             (g.pair.l0 + g.pair.l1 - g.pair.k0) * g.plan.hop - g.plan.half_window},
            {"region2_end",
             (g.pair.l0 + g.pair.l1 - g.pair.k0 - 1) * g.plan.hop + g.plan.half_window}};
        item["output_length"] = g.output_length;
        gaps.push_back(item);
    }
    j["gaps"] = gaps;
    j["restored_length"] = static_cast<std::int64_t>(result.restored.length());
    return j.dump(2) + "\n";
}

std::string verify_report_json(const std::string& input_path, double gap_seconds,
                               const AlgoConfig& cfg, const VerifyResult& result) {
    json j;
    j["schema_version"] = 1;
    j["input"] = input_path;
    j["gap_seconds"] = gap_seconds;
    j["seed"] = result.seed;
    j["config"] = json::parse(config_to_json(cfg));
    json trials = json::array();
    for (const auto& t : result.trials)
        trials.push_back({{"gap_start", t.gap_start},
                          {"gap_end", t.gap_end},
                          {"rel_error", t.rel_error},
                          {"pass", t.pass}});
    j["trials"] = trials;
    j["pass"] = result.pass;
    return j.dump(2) + "\n";
}

}  // namespace simgap
