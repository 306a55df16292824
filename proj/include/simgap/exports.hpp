#pragma once

#include <string>

#include "simgap/pipeline.hpp"

namespace simgap {

/// Edge-list CSV: one "# stage=<w0|w|ws> n=<N>" comment line, then l,k,weight
/// rows ('.' decimals, '\n' line endings).
void export_edges(const std::string& path, const SparseWeights& weights);

/// F1 or F2 as a CSV matrix with frames as columns (full M rows, mirror
/// rows expanded).
enum class FeatureKind { F1, F2 };
void export_feature_csv(const std::string& path, const FeatureMatrix& fm, FeatureKind kind);

/// Deterministic JSON report of an inpainting run (schema_version 1). Stage
/// timings are deliberately not included; they go to stdout.
std::string inpaint_report_json(const std::string& input_path, const std::string& output_path,
                                const AudioBuffer& input, const AlgoConfig& cfg,
                                const InpaintResult& result);

std::string verify_report_json(const std::string& input_path, double gap_seconds,
                               const AlgoConfig& cfg, const VerifyResult& result);

}  // namespace simgap
