#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "radunc/csv.hpp"
#include "radunc/error.hpp"
#include "radunc/ranking.hpp"
#include "radunc/simulate.hpp"
#include "radunc/trueskill.hpp"

namespace radunc {

struct PathConfig {
    std::string dictionary = "data/dx_pathway.csv";
    std::string synonyms = "data/synonyms.csv";
    std::string location_classes = "data/location_classes.csv";
    std::string blacklist = "data/blacklist.csv";
    std::string prompt_template = "data/comparison_prompt.txt";

    friend bool operator==(const PathConfig&, const PathConfig&) = default;
};

struct SyntheticConfig {
    int judges = 4;
    double noise_scale = 3.0;
    std::uint64_t seed = 7;

    friend bool operator==(const SyntheticConfig&, const SyntheticConfig&) = default;
};

struct SimulationConfig {
    std::vector<std::string> strategies{"draw_probability", "random"};
    std::string judge_mode = "all";
    std::string judge_id;
    std::vector<int> sweep_k{0, 1, 5, 10, 20, 50, 100};
    std::vector<int> sweep_n{2, 3, 5, 10, 20};
    std::optional<std::vector<std::string>> phrases;

    friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

/// Everything a command needs beyond its input files. Relative paths are
/// resolved against the config file's directory when loaded from disk.
struct PipelineConfig {
    RatingConfig rating;
    FitConfig fit;
    Anchor anchor_low{7.07, 0.170};
    Anchor anchor_high{43.44, 0.839};
    double dedup_threshold = 0.9;
    std::size_t embedding_dimension = 1024;
    int vocabulary_threshold = 10;
    PathConfig paths;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    SyntheticConfig synthetic;
    SimulationConfig simulate;
    int remote_timeout_seconds = 30;
    int remote_retries = 2;

    void validate() const {
        rating.validate();
        fit.validate();
        if (!(dedup_threshold > 0.0 && dedup_threshold <= 1.0)) {
            throw Error(ErrorCode::InvalidConfig, "dedup_threshold must lie in (0, 1]");
        }
        if (embedding_dimension == 0) throw Error(ErrorCode::InvalidConfig, "embedding_dimension must be > 0");
        if (vocabulary_threshold < 1) throw Error(ErrorCode::InvalidConfig, "vocabulary_threshold must be >= 1");
        if (seeds.empty()) throw Error(ErrorCode::InvalidConfig, "seeds must be non-empty");
        if (synthetic.judges < 1) throw Error(ErrorCode::InvalidConfig, "synthetic.judges must be >= 1");
        if (!(synthetic.noise_scale > 0.0)) throw Error(ErrorCode::InvalidConfig, "synthetic.noise_scale must be > 0");
        for (const auto& s : simulate.strategies) {
            if (!parse_selection(s)) throw Error(ErrorCode::InvalidConfig, "unknown strategy '" + s + "'");
        }
        if (simulate.judge_mode != "all" && simulate.judge_mode != "single") {
            throw Error(ErrorCode::InvalidConfig, "simulate.judge_mode must be all or single");
        }
        calibrate_sigmoid(anchor_low, anchor_high);
    }
};

inline void to_json(nlohmann::json& j, const PipelineConfig& c) {
    using nlohmann::json;
    j = json{
        {"rating",
         {{"mu0", c.rating.mu0},
          {"sigma0", c.rating.sigma0},
          {"beta_sq", c.rating.beta_sq},
          {"tau", c.rating.tau},
          {"draw_probability", c.rating.draw_probability}}},
        {"fit",
         {{"K", c.fit.K}, {"N", c.fit.N}, {"max_steps", c.fit.max_steps}, {"patience", c.fit.patience},
          {"seed", c.fit.seed}}},
        {"sigmoid",
         {{"low", {{"mu", c.anchor_low.mu}, {"p", c.anchor_low.p}}},
          {"high", {{"mu", c.anchor_high.mu}, {"p", c.anchor_high.p}}}}},
        {"dedup_threshold", c.dedup_threshold},
        {"embedding_dimension", c.embedding_dimension},
        {"vocabulary_threshold", c.vocabulary_threshold},
        {"paths",
         {{"dictionary", c.paths.dictionary},
          {"synonyms", c.paths.synonyms},
          {"location_classes", c.paths.location_classes},
          {"blacklist", c.paths.blacklist},
          {"prompt_template", c.paths.prompt_template}}},
        {"seeds", c.seeds},
        {"synthetic", {{"judges", c.synthetic.judges}, {"noise_scale", c.synthetic.noise_scale}, {"seed", c.synthetic.seed}}},
        {"simulate",
         {{"strategies", c.simulate.strategies},
          {"judge_mode", c.simulate.judge_mode},
          {"judge_id", c.simulate.judge_id},
          {"sweep_K", c.simulate.sweep_k},
          {"sweep_N", c.simulate.sweep_n}}},
        {"remote", {{"timeout_seconds", c.remote_timeout_seconds}, {"retries", c.remote_retries}}},
    };
    if (c.simulate.phrases) j["simulate"]["phrases"] = *c.simulate.phrases;
}

namespace detail {

template <class T>
void read_field(const nlohmann::json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, where + "." + key + ": " + e.what());
    }
}

inline const nlohmann::json& section(const nlohmann::json& j, const char* key) {
    static const nlohmann::json empty = nlohmann::json::object();
    if (!j.contains(key)) return empty;
    if (!j.at(key).is_object()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be an object");
    return j.at(key);
}

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> known, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto k : known) ok = ok || it.key() == k;
        if (!ok) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + where + it.key() + "'");
    }
}

} // namespace detail

/// Missing keys keep their defaults; unknown keys are rejected.
inline void from_json(const nlohmann::json& j, PipelineConfig& c) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    detail::reject_unknown(j,
                           {"rating", "fit", "sigmoid", "dedup_threshold", "embedding_dimension", "vocabulary_threshold",
                            "paths", "seeds", "synthetic", "simulate", "remote"},
                           "");
    const auto& r = detail::section(j, "rating");
    detail::reject_unknown(r, {"mu0", "sigma0", "beta_sq", "tau", "draw_probability"}, "rating.");
    detail::read_field(r, "mu0", c.rating.mu0, "rating");
    detail::read_field(r, "sigma0", c.rating.sigma0, "rating");
    detail::read_field(r, "beta_sq", c.rating.beta_sq, "rating");
    detail::read_field(r, "tau", c.rating.tau, "rating");
    detail::read_field(r, "draw_probability", c.rating.draw_probability, "rating");

    const auto& f = detail::section(j, "fit");
    detail::reject_unknown(f, {"K", "N", "max_steps", "patience", "seed"}, "fit.");
    detail::read_field(f, "K", c.fit.K, "fit");
    detail::read_field(f, "N", c.fit.N, "fit");
    detail::read_field(f, "max_steps", c.fit.max_steps, "fit");
    detail::read_field(f, "patience", c.fit.patience, "fit");
    detail::read_field(f, "seed", c.fit.seed, "fit");

    const auto& s = detail::section(j, "sigmoid");
    detail::reject_unknown(s, {"low", "high"}, "sigmoid.");
    for (auto [key, anchor] : {std::pair{"low", &c.anchor_low}, std::pair{"high", &c.anchor_high}}) {
        const auto& a = detail::section(s, key);
        detail::reject_unknown(a, {"mu", "p"}, std::string("sigmoid.") + key + ".");
        detail::read_field(a, "mu", anchor->mu, std::string("sigmoid.") + key);
        detail::read_field(a, "p", anchor->p, std::string("sigmoid.") + key);
    }

    detail::read_field(j, "dedup_threshold", c.dedup_threshold, "config");
    detail::read_field(j, "embedding_dimension", c.embedding_dimension, "config");
    detail::read_field(j, "vocabulary_threshold", c.vocabulary_threshold, "config");
    detail::read_field(j, "seeds", c.seeds, "config");

    const auto& p = detail::section(j, "paths");
    detail::reject_unknown(p, {"dictionary", "synonyms", "location_classes", "blacklist", "prompt_template"}, "paths.");
    detail::read_field(p, "dictionary", c.paths.dictionary, "paths");
    detail::read_field(p, "synonyms", c.paths.synonyms, "paths");
    detail::read_field(p, "location_classes", c.paths.location_classes, "paths");
    detail::read_field(p, "blacklist", c.paths.blacklist, "paths");
    detail::read_field(p, "prompt_template", c.paths.prompt_template, "paths");

    const auto& syn = detail::section(j, "synthetic");
    detail::reject_unknown(syn, {"judges", "noise_scale", "seed"}, "synthetic.");
    detail::read_field(syn, "judges", c.synthetic.judges, "synthetic");
    detail::read_field(syn, "noise_scale", c.synthetic.noise_scale, "synthetic");
    detail::read_field(syn, "seed", c.synthetic.seed, "synthetic");

    const auto& sim = detail::section(j, "simulate");
    detail::reject_unknown(sim, {"strategies", "judge_mode", "judge_id", "sweep_K", "sweep_N", "phrases"}, "simulate.");
    detail::read_field(sim, "strategies", c.simulate.strategies, "simulate");
    detail::read_field(sim, "judge_mode", c.simulate.judge_mode, "simulate");
    detail::read_field(sim, "judge_id", c.simulate.judge_id, "simulate");
    detail::read_field(sim, "sweep_K", c.simulate.sweep_k, "simulate");
    detail::read_field(sim, "sweep_N", c.simulate.sweep_n, "simulate");
    if (sim.contains("phrases")) {
        std::vector<std::string> phrases;
        detail::read_field(sim, "phrases", phrases, "simulate");
        c.simulate.phrases = std::move(phrases);
    }

    const auto& rem = detail::section(j, "remote");
    detail::reject_unknown(rem, {"timeout_seconds", "retries"}, "remote.");
    detail::read_field(rem, "timeout_seconds", c.remote_timeout_seconds, "remote");
    detail::read_field(rem, "retries", c.remote_retries, "remote");
}

/// Reads and validates a config file, resolving relative data paths against
/// the file's directory.
inline PipelineConfig load_config(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(csv::read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::InvalidConfig, path + ": not valid JSON");
    PipelineConfig c = j.get<PipelineConfig>();
    const auto base = std::filesystem::path(path).parent_path();
    for (auto* field : {&c.paths.dictionary, &c.paths.synonyms, &c.paths.location_classes, &c.paths.blacklist,
                        &c.paths.prompt_template}) {
        std::filesystem::path fp(*field);
        if (fp.is_relative() && !base.empty()) *field = (base / fp).lexically_normal().string();
    }
    c.validate();
    return c;
}

} // namespace radunc
