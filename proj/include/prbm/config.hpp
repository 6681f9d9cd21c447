// Copyright 2026 The prbm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "prbm/eval.hpp"
#include "prbm/matrix.hpp"
#include "prbm/model_io.hpp"
#include "prbm/trainer.hpp"

namespace prbm {

/// A fully resolved experiment: what to run, on which data, over which
/// constraint grid. Produced from a flat `key = value` config file plus
/// command-line overrides.
struct ExperimentPlan {
    std::string mode;  // train | eval | sample | sweep | topology-info
    std::string experiment_id = "exp";
    std::string train_data;
    std::string test_data;
    std::string train_labels;
    std::string data_format = "csv";  // csv | idx
    std::string out_dir = ".";
    std::string model_in;
    std::string model_out;

    std::size_t num_hidden = 0;
    TrainConfig train;

    std::vector<double> sigma_w_grid{0.0};
    std::vector<double> sigma_b_grid{0.0};
    std::vector<double> cap_grid{std::numeric_limits<double>::infinity()};
    std::vector<std::string> mask_grid{"dense"};
    std::vector<std::uint64_t> seeds{0};

    std::string mapping = "none";  // none | pixel_blocks | extended_pixel_blocks
    AisConfig ais;
    std::size_t noise_draws = 5;
    std::size_t exact_nll_threshold = kExactNllThreshold;
    std::size_t n_samples = 16;
    std::size_t sample_gibbs_steps = 100000;
    bool emit_samples = false;
    std::string chimera;  // "MxNxL"
    int threads = 1;
};

namespace config_detail {

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "mode",          "experiment_id",   "train_data",      "test_data",
        "train_labels",  "data_format",     "out_dir",         "model_in",
        "model_out",     "num_hidden",      "k",               "learning_rate",
        "batch_size",    "num_chains",      "epochs",          "init_weight_stddev",
        "negative_phase", "train_log_nll",  "seed",            "seeds",
        "sigma_w",       "sigma_b",         "cap",             "mask",
        "mapping",       "ais_betas",       "ais_particles",   "noise_draws",
        "exact_nll_threshold", "n_samples", "sample_gibbs_steps", "emit_samples",
        "chimera",       "threads",
    };
    return keys;
}

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

inline std::string nearest_key(const std::string& key) {
    std::string best;
    std::size_t best_dist = std::numeric_limits<std::size_t>::max();
    for (const std::string& k : known_keys()) {
        const std::size_t d = edit_distance(key, k);
        if (d < best_dist) {
            best_dist = d;
            best = k;
        }
    }
    return best;
}

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(value);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_double(const std::string& key, const std::string& value) {
    if (value == "inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': cannot parse '" + value + "' as a number");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': cannot parse '" + value + "' as an integer");
    }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::runtime_error("config key '" + key + "': cannot parse '" + value + "' as a bool");
}

}  // namespace config_detail

using ConfigEntries = std::map<std::string, std::string>;

/// Flat `key = value` file; '#' starts a comment; lists are comma-separated.
/// Unknown keys are rejected, naming the nearest known key.
inline ConfigEntries read_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    ConfigEntries entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = config_detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = config_detail::trim(line.substr(0, eq));
        const std::string value = config_detail::trim(line.substr(eq + 1));
        const auto& keys = config_detail::known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                                     "' (did you mean '" + config_detail::nearest_key(key) + "'?)");
        entries[key] = value;
    }
    return entries;
}

/// Builds a plan from merged entries (file first, then flag overrides).
inline ExperimentPlan plan_from_entries(const ConfigEntries& entries) {
    namespace cd = config_detail;
    ExperimentPlan plan;
    for (const auto& [key, value] : entries) {
        if (key == "mode") plan.mode = value;
        else if (key == "experiment_id") plan.experiment_id = value;
        else if (key == "train_data") plan.train_data = value;
        else if (key == "test_data") plan.test_data = value;
        else if (key == "train_labels") plan.train_labels = value;
        else if (key == "data_format") plan.data_format = value;
        else if (key == "out_dir") plan.out_dir = value;
        else if (key == "model_in") plan.model_in = value;
        else if (key == "model_out") plan.model_out = value;
        else if (key == "num_hidden") plan.num_hidden = cd::parse_u64(key, value);
        else if (key == "k") plan.train.gibbs_steps = cd::parse_u64(key, value);
        else if (key == "learning_rate") plan.train.learning_rate = cd::parse_double(key, value);
        else if (key == "batch_size") plan.train.batch_size = cd::parse_u64(key, value);
        else if (key == "num_chains") plan.train.num_chains = cd::parse_u64(key, value);
        else if (key == "epochs") plan.train.epochs = cd::parse_u64(key, value);
        else if (key == "init_weight_stddev") plan.train.init_weight_stddev = cd::parse_double(key, value);
        else if (key == "negative_phase") {
            if (value == "simulated_physical") plan.train.negative_phase = NegativePhase::simulated_physical;
            else if (value == "plain_gibbs") plan.train.negative_phase = NegativePhase::plain_gibbs;
            else if (value == "exact_enumeration") plan.train.negative_phase = NegativePhase::exact_enumeration;
            else throw std::runtime_error("config key 'negative_phase': unknown value '" + value + "'");
        } else if (key == "train_log_nll") plan.train.log_exact_nll = cd::parse_bool(key, value);
        else if (key == "seed") { plan.train.seed = cd::parse_u64(key, value); plan.seeds = {plan.train.seed}; }
        else if (key == "seeds") {
            plan.seeds.clear();
            for (const std::string& s : cd::split_list(value)) plan.seeds.push_back(cd::parse_u64(key, s));
        } else if (key == "sigma_w") {
            plan.sigma_w_grid.clear();
            for (const std::string& s : cd::split_list(value)) plan.sigma_w_grid.push_back(cd::parse_double(key, s));
        } else if (key == "sigma_b") {
            plan.sigma_b_grid.clear();
            for (const std::string& s : cd::split_list(value)) plan.sigma_b_grid.push_back(cd::parse_double(key, s));
        } else if (key == "cap") {
            plan.cap_grid.clear();
            for (const std::string& s : cd::split_list(value)) plan.cap_grid.push_back(cd::parse_double(key, s));
        } else if (key == "mask") {
            plan.mask_grid = cd::split_list(value);
        } else if (key == "mapping") plan.mapping = value;
        else if (key == "ais_betas") plan.ais.num_betas = cd::parse_u64(key, value);
        else if (key == "ais_particles") plan.ais.num_particles = cd::parse_u64(key, value);
        else if (key == "noise_draws") plan.noise_draws = cd::parse_u64(key, value);
        else if (key == "exact_nll_threshold") plan.exact_nll_threshold = cd::parse_u64(key, value);
        else if (key == "n_samples") plan.n_samples = cd::parse_u64(key, value);
        else if (key == "sample_gibbs_steps") plan.sample_gibbs_steps = cd::parse_u64(key, value);
        else if (key == "emit_samples") plan.emit_samples = cd::parse_bool(key, value);
        else if (key == "chimera") plan.chimera = value;
        else if (key == "threads") plan.threads = static_cast<int>(cd::parse_u64(key, value));
    }
    plan.train.threads = plan.threads;
    plan.ais.threads = plan.threads;

    static const std::vector<std::string> modes = {"train", "eval", "sample", "sweep", "topology-info"};
    if (std::find(modes.begin(), modes.end(), plan.mode) == modes.end())
        throw std::runtime_error("config: mode must be one of train|eval|sample|sweep|topology-info (got '" +
                                 plan.mode + "')");
    if (plan.data_format != "csv" && plan.data_format != "idx")
        throw std::runtime_error("config: data_format must be csv or idx");
    if (plan.mapping != "none" && plan.mapping != "pixel_blocks" && plan.mapping != "extended_pixel_blocks")
        throw std::runtime_error("config: unknown mapping '" + plan.mapping + "'");
    require(!plan.seeds.empty() && !plan.sigma_w_grid.empty() && !plan.sigma_b_grid.empty() &&
                !plan.cap_grid.empty() && !plan.mask_grid.empty(),
            "config: grids and seeds must be nonempty");
    for (std::size_t i = 0; i < plan.seeds.size(); ++i)
        for (std::size_t j = i + 1; j < plan.seeds.size(); ++j)
            require(plan.seeds[i] != plan.seeds[j], "config: seeds must be distinct");
    return plan;
}

/// Every key with its resolved value — the audit trail echoed into CSV
/// metadata headers.
inline std::vector<std::pair<std::string, std::string>> resolved_entries(const ExperimentPlan& plan) {
    auto fmt = detail::format_double;
    auto join_doubles = [&](const std::vector<double>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
        return s;
    };
    std::string seed_list, mask_list;
    for (std::size_t i = 0; i < plan.seeds.size(); ++i)
        seed_list += (i ? "," : "") + std::to_string(plan.seeds[i]);
    for (std::size_t i = 0; i < plan.mask_grid.size(); ++i) mask_list += (i ? "," : "") + plan.mask_grid[i];
    return {
        {"mode", plan.mode},
        {"experiment_id", plan.experiment_id},
        {"train_data", plan.train_data},
        {"test_data", plan.test_data},
        {"train_labels", plan.train_labels},
        {"data_format", plan.data_format},
        {"out_dir", plan.out_dir},
        {"model_in", plan.model_in},
        {"model_out", plan.model_out},
        {"num_hidden", std::to_string(plan.num_hidden)},
        {"k", std::to_string(plan.train.gibbs_steps)},
        {"learning_rate", fmt(plan.train.learning_rate)},
        {"batch_size", std::to_string(plan.train.batch_size)},
        {"num_chains", std::to_string(plan.train.num_chains)},
        {"epochs", std::to_string(plan.train.epochs)},
        {"init_weight_stddev", fmt(plan.train.init_weight_stddev)},
        {"negative_phase", to_string(plan.train.negative_phase)},
        {"train_log_nll", plan.train.log_exact_nll ? "true" : "false"},
        {"seeds", seed_list},
        {"sigma_w", join_doubles(plan.sigma_w_grid)},
        {"sigma_b", join_doubles(plan.sigma_b_grid)},
        {"cap", join_doubles(plan.cap_grid)},
        {"mask", mask_list},
        {"mapping", plan.mapping},
        {"ais_betas", std::to_string(plan.ais.num_betas)},
        {"ais_particles", std::to_string(plan.ais.num_particles)},
        {"noise_draws", std::to_string(plan.noise_draws)},
        {"exact_nll_threshold", std::to_string(plan.exact_nll_threshold)},
        {"n_samples", std::to_string(plan.n_samples)},
        {"sample_gibbs_steps", std::to_string(plan.sample_gibbs_steps)},
        {"emit_samples", plan.emit_samples ? "true" : "false"},
        {"chimera", plan.chimera},
        {"threads", std::to_string(plan.threads)},
    };
}

}  // namespace prbm
