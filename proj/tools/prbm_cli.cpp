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

// Experiment runner: trains and evaluates RBMs under simulated physical
// sampling constraints (parameter noise, magnitude caps, restricted
// connectivity) and reproduces the constraint sweeps as CSV + PGM artifacts.

#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "prbm/prbm.hpp"

namespace {

using prbm::ConfigEntries;

struct CliOptions {
    std::string config_path;
    std::map<std::string, std::string> overrides;
};

// Every config key doubles as a --key flag; flags override file values.
void add_key_flags(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("-c,--config", opts.config_path, "flat key = value config file");
    for (const std::string& key : prbm::config_detail::known_keys()) {
        if (key == "mode") continue;
        cmd->add_option_function<std::string>(
            "--" + key, [&opts, key](const std::string& v) { opts.overrides[key] = v; },
            "override config key " + key);
    }
}

ConfigEntries merged_entries(const CliOptions& opts, const std::string& mode) {
    ConfigEntries entries;
    if (!opts.config_path.empty()) entries = prbm::read_config_file(opts.config_path);
    for (const auto& [k, v] : opts.overrides) entries[k] = v;
    entries["mode"] = mode;
    return entries;
}

int run_topology_info(const prbm::ExperimentPlan& plan) {
    std::string dims = plan.chimera.empty() ? "8x8x4" : plan.chimera;
    std::size_t m = 0, n = 0, l = 0;
    if (!prbm::sweep_detail::parse_chimera_dims(dims, m, n, l)) {
        std::cerr << "cannot parse chimera dims '" << dims << "' (expected MxNxL)\n";
        return 1;
    }
    const prbm::ChimeraGraph g = prbm::build_chimera(m, n, l);
    const prbm::Bipartition part = prbm::bipartition(g);
    const prbm::ConnectivityMask mask = prbm::chimera_mask(g, part);
    std::cout << "chimera C(" << m << "," << n << "," << l << ")\n";
    std::cout << "nodes: " << g.num_nodes() << "\n";
    std::cout << "edges: " << g.edges.size() << "\n";
    std::cout << "partition: " << part.num_visible << " visible / " << part.num_hidden << " hidden\n";
    std::cout << "mask: " << mask.allowed_count() << " of " << mask.allowed.size() << " weights allowed ("
              << 100.0 * (1.0 - mask.density()) << "% removed)\n";
    return 0;
}

int run_train(const prbm::ExperimentPlan& plan) {
    const prbm::SweepContext ctx = prbm::load_sweep_context(plan);
    prbm::ConstraintSpec spec;
    spec.sigma_w = plan.sigma_w_grid.front();
    spec.sigma_b = plan.sigma_b_grid.front();
    spec.magnitude_cap = plan.cap_grid.front();
    spec.mask = prbm::sweep_detail::build_mask(plan.mask_grid.front(), ctx.num_visible, plan.num_hidden);

    prbm::TrainConfig tc = plan.train;
    tc.seed = plan.seeds.front();
    tc.constraint = spec;

    prbm::RbmParams params;
    prbm::TrainLog log;
    if (ctx.mapping) {
        const prbm::PixelMapping& mapping = *ctx.mapping;
        auto presenter = [&mapping](const prbm::Vector& row, prbm::RngStream& rng) {
            return prbm::binarize_mapped(mapping, row, rng);
        };
        std::tie(params, log) = prbm::train(ctx.train_data, plan.num_hidden, tc, presenter);
    } else {
        std::tie(params, log) = prbm::train(ctx.train_data, plan.num_hidden, tc);
    }

    const std::string model_path =
        plan.model_out.empty() ? plan.out_dir + "/" + plan.experiment_id + ".prbm" : plan.model_out;
    prbm::save_model(model_path, params, spec);
    std::cout << "model written to " << model_path << "\n";

    const std::string log_path = plan.out_dir + "/" + plan.experiment_id + "_train_log.csv";
    std::ofstream os(log_path);
    for (const auto& [key, value] : prbm::resolved_entries(plan)) os << "# " << key << " = " << value << "\n";
    os << "epoch,epoch_seed,w_norm,vbias_norm,hbias_norm,exact_nll,seconds\n";
    os.precision(12);
    for (const auto& rec : log.epochs) {
        os << rec.epoch << "," << rec.epoch_seed << "," << rec.w_norm << "," << rec.vbias_norm << ","
           << rec.hbias_norm << ",";
        if (rec.has_exact_nll) os << rec.exact_nll;
        os << "," << rec.seconds << "\n";
    }
    std::cout << "training log written to " << log_path << " (" << log.num_updates << " updates)\n";
    return 0;
}

int run_sample(const prbm::ExperimentPlan& plan) {
    if (plan.model_in.empty()) {
        std::cerr << "sample mode needs model_in\n";
        return 1;
    }
    const auto [params, spec] = prbm::load_model(plan.model_in);
    const prbm::SweepContext ctx = prbm::load_sweep_context(plan);
    const auto samples = prbm::sample_grid(params, plan.n_samples, plan.sample_gibbs_steps,
                                           plan.seeds.front(), plan.threads);
    std::vector<prbm::Matrix> tiles;
    for (const prbm::Vector& s : samples) {
        if (ctx.mapping) {
            prbm::Matrix img(ctx.mapping->image_height, ctx.mapping->image_width);
            img.data = prbm::pixels_from_units(*ctx.mapping, s);
            tiles.push_back(std::move(img));
        } else {
            std::size_t side = 1;
            while (side * side < s.size()) ++side;
            if (side * side == s.size()) {
                prbm::Matrix img(side, side);
                img.data = s;
                tiles.push_back(std::move(img));
            } else {
                prbm::Matrix img(1, s.size());
                img.data = s;
                tiles.push_back(std::move(img));
            }
        }
    }
    std::size_t per_row = 1;
    while (per_row * per_row < tiles.size()) ++per_row;
    const std::string path = plan.out_dir + "/" + plan.experiment_id + "_samples.pgm";
    prbm::write_pgm(prbm::tile_images(tiles, per_row), path);
    std::cout << "sample grid written to " << path << "\n";
    return 0;
}

int run_sweep_mode(const prbm::ExperimentPlan& plan) {
    if (plan.mode == "eval" && plan.model_in.empty()) {
        std::cerr << "eval mode needs model_in\n";
        return 1;
    }
    const prbm::SweepResult result = prbm::run_sweep(plan);
    std::cout << "results written to " << result.csv_path << " (" << result.rows.size() << " cells, "
              << result.num_failed << " failed)\n";
    return result.num_failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulated physical-computer RBM experiment runner"};
    app.require_subcommand(1);

    std::map<std::string, CliOptions> options;
    const std::vector<std::string> modes = {"train", "eval", "sample", "sweep", "topology-info"};
    const std::map<std::string, std::string> blurbs = {
        {"train", "train one model and save it"},
        {"eval", "evaluate a saved model over a constraint grid"},
        {"sample", "draw a sample grid from a saved model"},
        {"sweep", "train and evaluate over a constraint grid"},
        {"topology-info", "print chimera graph facts"},
    };
    for (const std::string& mode : modes) add_key_flags(app.add_subcommand(mode, blurbs.at(mode)), options[mode]);

    CLI11_PARSE(app, argc, argv);

    const std::string mode = app.get_subcommands().front()->get_name();
    try {
        const prbm::ExperimentPlan plan = prbm::plan_from_entries(merged_entries(options[mode], mode));
        std::filesystem::create_directories(plan.out_dir);
        if (mode == "topology-info") return run_topology_info(plan);
        if (mode == "train") return run_train(plan);
        if (mode == "sample") return run_sample(plan);
        return run_sweep_mode(plan);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
