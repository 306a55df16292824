#pragma once

#include <string>

#include "simgap/errors.hpp"

namespace simgap {

/// Algorithm defaults: analysis on a <= 12 kHz decimated mono mix, 8x
/// redundant Itersine STFT, 50 dB clipped spectrogram plus weighted relative
/// instantaneous frequency, K=40 neighbors, half-second diagonal kernel,
/// threshold 2, objective weights 1/100, 5 s transition leeway.
struct AlgoConfig {
    double xi_max = 12000.0;   // maximum analysis sampling frequency, Hz
    int a = 128;               // hop, decimated samples
    int M = 1024;              // frequency channels
    int L_w = 1024;            // window length, decimated samples
    std::string window = "itersine";
    double t_s = 50.0;         // spectrogram dynamic range, dB
    double lambda = 1.5;       // phase-feature weight
    int K = 40;                // initial neighbor count
    int L_K = 40;              // diagonal kernel length, frames
    double t_w = 2.0;          // weight threshold
    double gamma_len = 1.0;    // objective border weight
    double gamma_w = 100.0;    // objective inverse-weight term
    double epsilon_seconds = 5.0;  // acceptable-range length around the gap
    int v_len = 8;             // IF smoothing kernel length, frames
    std::string knn_mode = "exact";  // exact | approx

    void validate() const;
    bool approx_knn() const { return knn_mode == "approx"; }
};

/// JSON (de)serialization; keys mirror the field names exactly and round-trip
/// losslessly. Unknown keys are rejected.
std::string config_to_json(const AlgoConfig& cfg);
AlgoConfig config_from_json(const std::string& text);
AlgoConfig load_config_file(const std::string& path);

}  // namespace simgap
