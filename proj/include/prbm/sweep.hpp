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

#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "prbm/chimera.hpp"
#include "prbm/config.hpp"
#include "prbm/dataset.hpp"
#include "prbm/eval.hpp"
#include "prbm/model_io.hpp"
#include "prbm/pixel_map.hpp"
#include "prbm/trainer.hpp"

namespace prbm {

/// One cell of the constraint grid.
struct SweepCell {
    double sigma_w = 0.0;
    double sigma_b = 0.0;
    double cap = std::numeric_limits<double>::infinity();
    std::string mask_spec = "dense";
    std::uint64_t seed = 0;
};

struct SweepRow {
    SweepCell cell;
    std::string mask_kind = "dense";
    double mask_density = 1.0;
    NllEstimate nll;
    double runtime_s = 0.0;
    bool ok = true;
    std::string error;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::size_t num_failed = 0;
    std::string csv_path;
};

namespace sweep_detail {

inline bool parse_chimera_dims(const std::string& s, std::size_t& m, std::size_t& n, std::size_t& l) {
    unsigned long long mm = 0, nn = 0, ll = 0;
    char sep1 = 0, sep2 = 0;
    std::istringstream ss(s);
    if (!(ss >> mm >> sep1 >> nn >> sep2 >> ll) || sep1 != 'x' || sep2 != 'x') return false;
    m = mm;
    n = nn;
    l = ll;
    return true;
}

/// "dense" | "random_drop:<p>:<seed>" | "chimera:<M>x<N>x<L>" | "file:<path>"
inline ConnectivityMask build_mask(const std::string& spec, std::size_t num_visible,
                                   std::size_t num_hidden) {
    if (spec == "dense") return dense_mask(num_hidden, num_visible);
    if (spec.rfind("file:", 0) == 0) {
        ConnectivityMask mask = load_mask(spec.substr(5));
        require(mask.num_visible == num_visible && mask.num_hidden == num_hidden,
                "mask file shape does not match the model");
        return mask;
    }
    if (spec.rfind("random_drop:", 0) == 0) {
        const std::string rest = spec.substr(std::string("random_drop:").size());
        const auto colon = rest.find(':');
        require(colon != std::string::npos, "mask spec '" + spec + "': expected random_drop:<p>:<seed>");
        const double p = config_detail::parse_double("mask", rest.substr(0, colon));
        const std::uint64_t seed = config_detail::parse_u64("mask", rest.substr(colon + 1));
        return random_drop_mask(num_visible, num_hidden, p, seed);
    }
    if (spec.rfind("chimera:", 0) == 0) {
        std::size_t m = 0, n = 0, l = 0;
        require(parse_chimera_dims(spec.substr(std::string("chimera:").size()), m, n, l),
                "mask spec '" + spec + "': expected chimera:<M>x<N>x<L>");
        const ChimeraGraph g = build_chimera(m, n, l);
        const Bipartition part = bipartition(g);
        ConnectivityMask mask = chimera_mask(g, part);
        require(mask.num_visible == num_visible && mask.num_hidden == num_hidden,
                "chimera mask " + spec + " does not match model dimensions " + std::to_string(num_visible) +
                    "x" + std::to_string(num_hidden));
        return mask;
    }
    throw std::runtime_error("unknown mask spec '" + spec + "'");
}

inline std::string mask_kind(const std::string& spec) {
    const auto colon = spec.find(':');
    return colon == std::string::npos ? spec : spec.substr(0, colon);
}

inline std::string csv_escape_error(std::string msg) {
    for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
    return msg;
}

}  // namespace sweep_detail

/// Everything a sweep needs in memory: datasets in pixel space plus the
/// optional pixel-to-unit mapping.
struct SweepContext {
    Dataset train_data;
    Dataset test_data;
    std::optional<PixelMapping> mapping;
    std::size_t num_visible = 0;  // model visible units (after mapping)
};

inline SweepContext load_sweep_context(const ExperimentPlan& plan) {
    SweepContext ctx;
    auto load = [&](const std::string& path) {
        return plan.data_format == "idx" ? load_idx(path) : load_binary_csv(path);
    };
    const bool needs_data = plan.mode != "sample" && plan.mode != "topology-info";
    if (needs_data) {
        require(!plan.train_data.empty(), "plan: train_data is required for mode " + plan.mode);
        ctx.train_data = load(plan.train_data);
        ctx.test_data = plan.test_data.empty() ? ctx.train_data : load(plan.test_data);
        ctx.test_data.split = "test";
    }
    if (plan.mapping != "none") {
        std::size_t m = 0, n = 0, l = 0;
        std::string dims;
        for (const std::string& spec : plan.mask_grid)
            if (spec.rfind("chimera:", 0) == 0) dims = spec.substr(std::string("chimera:").size());
        if (dims.empty()) dims = plan.chimera;
        require(!dims.empty(), "plan: a mapping needs a chimera mask or the chimera key");
        require(sweep_detail::parse_chimera_dims(dims, m, n, l), "plan: cannot parse chimera dims " + dims);
        const ChimeraGraph g = build_chimera(m, n, l);
        const Bipartition part = bipartition(g);
        const std::size_t height = 2 * m, width = 2 * n;
        if (needs_data)
            require(ctx.train_data.dim() == height * width,
                    "plan: dataset dim " + std::to_string(ctx.train_data.dim()) +
                        " does not match mapping image " + std::to_string(width) + "x" + std::to_string(height));
        ctx.mapping = plan.mapping == "pixel_blocks" ? pixel_blocks_mapping(width, height, g, part)
                                                     : extended_pixel_blocks_mapping(width, height, g, part);
        ctx.num_visible = ctx.mapping->num_units;
    } else if (needs_data) {
        ctx.num_visible = ctx.train_data.dim();
    }
    return ctx;
}

/// Trains (or loads) and evaluates one grid cell.
inline SweepRow run_cell(const ExperimentPlan& plan, const SweepContext& ctx, const SweepCell& cell) {
    SweepRow row;
    row.cell = cell;
    row.mask_kind = sweep_detail::mask_kind(cell.mask_spec);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        ConstraintSpec spec;
        spec.sigma_w = cell.sigma_w;
        spec.sigma_b = cell.sigma_b;
        spec.magnitude_cap = cell.cap;

        RbmParams params;
        if (!plan.model_in.empty()) {
            params = load_model(plan.model_in).first;
            spec.mask = sweep_detail::build_mask(cell.mask_spec, params.num_visible, params.num_hidden);
        } else {
            require(plan.num_hidden > 0, "plan: num_hidden is required when training");
            spec.mask = sweep_detail::build_mask(cell.mask_spec, ctx.num_visible, plan.num_hidden);
            TrainConfig tc = plan.train;
            tc.seed = cell.seed;
            tc.constraint = spec;
            if (ctx.mapping) {
                const PixelMapping& mapping = *ctx.mapping;
                auto presenter = [&mapping](const Vector& pixel_row, RngStream& rng) {
                    return binarize_mapped(mapping, pixel_row, rng);
                };
                params = train(ctx.train_data, plan.num_hidden, tc, presenter).first;
            } else {
                params = train(ctx.train_data, plan.num_hidden, tc).first;
            }
        }
        row.mask_density = spec.has_mask() ? spec.mask.density() : 1.0;

        // Test examples are binarized by the same method as training ones.
        RngStream test_rng(mix_seed(cell.seed, 0x7e57), stream_ids::kEvalBinarize);
        std::vector<BitVec> test_bits(ctx.test_data.num_examples());
        for (std::size_t t = 0; t < ctx.test_data.num_examples(); ++t) {
            const Vector r = ctx.test_data.row(t);
            test_bits[t] = ctx.mapping ? binarize_mapped(*ctx.mapping, r, test_rng) : binarize(r, test_rng);
        }

        AisConfig ais = plan.ais;
        if (ais.base_visible_biases.empty() && !ctx.mapping) ais.base_visible_biases = base_biases_from_data(ctx.test_data.rows);
        row.nll = expected_nll_under_noise(params, spec, test_bits, plan.noise_draws, ais, cell.seed,
                                           plan.exact_nll_threshold);

        if (plan.emit_samples) {
            const auto samples = sample_grid(params, plan.n_samples, plan.sample_gibbs_steps,
                                             mix_seed(cell.seed, 0x5a3f), plan.threads);
            std::vector<Matrix> tiles;
            for (const Vector& s : samples) {
                if (ctx.mapping) {
                    const Vector px = pixels_from_units(*ctx.mapping, s);
                    Matrix img(ctx.mapping->image_height, ctx.mapping->image_width);
                    img.data = px;
                    tiles.push_back(std::move(img));
                } else {
                    Matrix img(1, s.size());
                    img.data = s;
                    tiles.push_back(std::move(img));
                }
            }
            std::size_t per_row = 1;
            while (per_row * per_row < tiles.size()) ++per_row;
            std::ostringstream name;
            name << plan.out_dir << "/" << plan.experiment_id << "_samples_sw" << cell.sigma_w << "_sb"
                 << cell.sigma_b << "_seed" << cell.seed << ".pgm";
            write_pgm(tile_images(tiles, per_row), name.str());
        }
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = sweep_detail::csv_escape_error(e.what());
    }
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

inline void write_sweep_csv(const std::string& path, const ExperimentPlan& plan,
                            const std::vector<SweepRow>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open results file " + path);
    for (const auto& [key, value] : resolved_entries(plan)) os << "# " << key << " = " << value << "\n";
    os << "experiment_id,sigma_w,sigma_b,cap,mask_kind,mask_density,seed,nll_mean,nll_stderr,method,runtime_s\n";
    os.precision(12);
    for (const SweepRow& row : rows) {
        os << plan.experiment_id << "," << row.cell.sigma_w << "," << row.cell.sigma_b << ","
           << detail::format_double(row.cell.cap) << "," << row.mask_kind << "," << row.mask_density << ","
           << row.cell.seed << ",";
        if (row.ok)
            os << row.nll.mean << "," << row.nll.std_err << "," << row.nll.method;
        else
            os << ",," << "error(" << row.error << ")";
        os << "," << row.runtime_s << "\n";
    }
    if (!os) throw std::runtime_error("write failed for " + path);
}

/// Cartesian product of the constraint grid and the seed list; each cell
/// trains (or loads) a model and evaluates its expected NLL. Cell failures are
/// recorded and do not abort the sweep.
inline SweepResult run_sweep(const ExperimentPlan& plan) {
    const SweepContext ctx = load_sweep_context(plan);
    SweepResult result;
    for (double sigma_w : plan.sigma_w_grid)
        for (double sigma_b : plan.sigma_b_grid)
            for (double cap : plan.cap_grid)
                for (const std::string& mask_spec : plan.mask_grid)
                    for (std::uint64_t seed : plan.seeds) {
                        SweepCell cell;
                        cell.sigma_w = sigma_w;
                        cell.sigma_b = sigma_b;
                        cell.cap = cap;
                        cell.mask_spec = mask_spec;
                        cell.seed = seed;
                        SweepRow row = run_cell(plan, ctx, cell);
                        if (!row.ok) ++result.num_failed;
                        result.rows.push_back(std::move(row));
                    }
    result.csv_path = plan.out_dir + "/" + plan.experiment_id + "_results.csv";
    write_sweep_csv(result.csv_path, plan, result.rows);
    return result;
}

}  // namespace prbm
