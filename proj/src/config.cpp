#include "simgap/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace simgap {

using nlohmann::json;

void AlgoConfig::validate() const {
    if (xi_max <= 0) throw Error(ErrKind::InvalidRate, "xi_max must be positive");
    if (a <= 0) throw Error(ErrKind::InvalidArgs, "hop a must be positive");
    if (L_w <= 0 || L_w % 2 != 0) throw Error(ErrKind::InvalidLength, "L_w must be even, positive");
    if (M < L_w) throw Error(ErrKind::ParamMismatch, "M must be >= L_w (painless case)");
    if (L_w % (2 * a) != 0)
        throw Error(ErrKind::ParamMismatch, "L_w/(2a) must be an integer (tight frame)");
    if (t_s <= 0) throw Error(ErrKind::InvalidRange, "t_s must be positive");
    if (K < 1) throw Error(ErrKind::InvalidArgs, "K must be >= 1");
    if (L_K < 2 || L_K % 2 != 0)
        throw Error(ErrKind::InvalidKernelLength, "L_K must be even and >= 2");
    if (t_w <= 0) throw Error(ErrKind::InvalidArgs, "t_w must be positive");
    if (gamma_len < 0 || gamma_w < 0)
        throw Error(ErrKind::InvalidArgs, "objective weights must be nonnegative");
    if (epsilon_seconds <= 0) throw Error(ErrKind::InvalidArgs, "epsilon_seconds must be positive");
    if (v_len < 1) throw Error(ErrKind::InvalidArgs, "v_len must be >= 1");
    if (window != "itersine") throw Error(ErrKind::InvalidArgs, "only the itersine window is supported");
    if (knn_mode != "exact" && knn_mode != "approx")
        throw Error(ErrKind::InvalidArgs, "knn_mode must be 'exact' or 'approx'");
}

std::string config_to_json(const AlgoConfig& c) {
    json j;
    j["xi_max"] = c.xi_max;
    j["a"] = c.a;
    j["M"] = c.M;
    j["L_w"] = c.L_w;
    j["window"] = c.window;
    j["t_s"] = c.t_s;
    j["lambda"] = c.lambda;
    j["K"] = c.K;
    j["L_K"] = c.L_K;
    j["t_w"] = c.t_w;
    j["gamma_len"] = c.gamma_len;
    j["gamma_w"] = c.gamma_w;
    j["epsilon_seconds"] = c.epsilon_seconds;
    j["v_len"] = c.v_len;
    j["knn_mode"] = c.knn_mode;
    return j.dump(2);
}

AlgoConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrKind::InvalidArgs, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrKind::InvalidArgs, "config must be a JSON object");

    static const std::set<std::string> known = {
        "xi_max", "a",       "M",         "L_w",     "window",          "t_s",  "lambda", "K",
        "L_K",    "t_w",     "gamma_len", "gamma_w", "epsilon_seconds", "v_len", "knn_mode"};
    for (const auto& [key, unused] : j.items())
        if (!known.count(key)) throw Error(ErrKind::InvalidArgs, "unknown config key: " + key);

    AlgoConfig c;
    try {
        if (j.contains("xi_max")) c.xi_max = j["xi_max"].get<double>();
        if (j.contains("a")) c.a = j["a"].get<int>();
        if (j.contains("M")) c.M = j["M"].get<int>();
        if (j.contains("L_w")) c.L_w = j["L_w"].get<int>();
        if (j.contains("window")) c.window = j["window"].get<std::string>();
        if (j.contains("t_s")) c.t_s = j["t_s"].get<double>();
        if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
        if (j.contains("K")) c.K = j["K"].get<int>();
        if (j.contains("L_K")) c.L_K = j["L_K"].get<int>();
        if (j.contains("t_w")) c.t_w = j["t_w"].get<double>();
        if (j.contains("gamma_len")) c.gamma_len = j["gamma_len"].get<double>();
        if (j.contains("gamma_w")) c.gamma_w = j["gamma_w"].get<double>();
        if (j.contains("epsilon_seconds")) c.epsilon_seconds = j["epsilon_seconds"].get<double>();
        if (j.contains("v_len")) c.v_len = j["v_len"].get<int>();
        if (j.contains("knn_mode")) c.knn_mode = j["knn_mode"].get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrKind::InvalidArgs, std::string("bad config value: ") + e.what());
    }
    c.validate();
    return c;
}

AlgoConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrKind::IoError, "cannot open config " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json(text);
}

}  // namespace simgap
