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
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "prbm/constraints.hpp"
#include "prbm/dataset.hpp"
#include "prbm/matrix.hpp"
#include "prbm/rbm.hpp"
#include "prbm/rng.hpp"
#include "prbm/sampler.hpp"

namespace prbm {

enum class NegativePhase {
    simulated_physical,  // persistent chains through the noisy-snapshot sampler
    plain_gibbs,         // persistent chains on the raw parameters
    exact_enumeration,   // exact model expectations; small models only
};

inline std::string to_string(NegativePhase np) {
    switch (np) {
        case NegativePhase::simulated_physical: return "simulated_physical";
        case NegativePhase::plain_gibbs: return "plain_gibbs";
        case NegativePhase::exact_enumeration: return "exact_enumeration";
    }
    return "?";
}

struct TrainConfig {
    std::size_t gibbs_steps = 15;  // k of PCD-k
    double learning_rate = 0.01;
    std::size_t batch_size = 100;
    std::size_t num_chains = 100;
    std::size_t epochs = 1;
    std::uint64_t seed = 0;
    ConstraintSpec constraint;
    NegativePhase negative_phase = NegativePhase::simulated_physical;
    double init_weight_stddev = 0.01;
    int threads = 1;
    bool log_exact_nll = false;  // exact NLL per epoch when the model is small enough

    void validate() const {
        require(gibbs_steps >= 1, "TrainConfig: gibbs_steps must be >= 1");
        require(learning_rate >= 0.0, "TrainConfig: learning_rate must be nonnegative");
        require(batch_size >= 1 && num_chains >= 1 && epochs >= 1, "TrainConfig: counts must be positive");
        constraint.validate();
    }
};

struct EpochRecord {
    std::size_t epoch = 0;
    std::uint64_t epoch_seed = 0;
    double w_norm = 0.0;
    double vbias_norm = 0.0;
    double hbias_norm = 0.0;
    bool has_exact_nll = false;
    double exact_nll = 0.0;
    double seconds = 0.0;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
    std::uint64_t num_updates = 0;
    std::uint64_t weight_noise_redraws = 0;
};

// Auxiliary stream ids; chains use 0..num_chains-1.
namespace stream_ids {
inline constexpr std::uint64_t kWeightNoise = 0x8000000000000001ull;
inline constexpr std::uint64_t kShuffle = 0x8000000000000002ull;
inline constexpr std::uint64_t kBinarize = 0x8000000000000003ull;
inline constexpr std::uint64_t kInit = 0x8000000000000004ull;
inline constexpr std::uint64_t kEvalBinarize = 0x8000000000000005ull;
}  // namespace stream_ids

/// Each bit is 1 with probability equal to its grayscale value. Data are
/// re-binarized at every presentation.
inline BitVec binarize(const Vector& row, RngStream& rng) {
    BitVec bits(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
        require(row[i] >= 0.0 && row[i] <= 1.0,
                "binarize: entry " + std::to_string(row[i]) + " outside [0,1]");
        bits[i] = rng.bernoulli(row[i]) ? 1 : 0;
    }
    return bits;
}

/// Sufficient statistics (<v>, <h>, <h v^T>) of either gradient phase.
struct SuffStats {
    Vector v;   // length D
    Vector h;   // length N
    Matrix vh;  // N x D

    static SuffStats zeros(std::size_t d, std::size_t n) {
        SuffStats s;
        s.v.assign(d, 0.0);
        s.h.assign(n, 0.0);
        s.vh = Matrix(n, d, 0.0);
        return s;
    }
};

/// Mean-field positive phase: the exact conditional p(h|v) stands in for
/// sampled hidden states.
inline SuffStats positive_stats(const RbmParams& p, const std::vector<BitVec>& batch) {
    require(!batch.empty(), "positive_stats: empty batch");
    SuffStats st = SuffStats::zeros(p.num_visible, p.num_hidden);
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (const BitVec& v : batch) {
        const Vector ph = cond_hidden(p, v);
        for (std::size_t i = 0; i < p.num_visible; ++i)
            if (v[i]) st.v[i] += inv;
        for (std::size_t j = 0; j < p.num_hidden; ++j) {
            st.h[j] += inv * ph[j];
            const double w = inv * ph[j];
            for (std::size_t i = 0; i < p.num_visible; ++i)
                if (v[i]) st.vh(j, i) += w;
        }
    }
    return st;
}

/// Monte Carlo negative phase over binary chain states.
inline SuffStats negative_stats(const std::vector<ChainState>& chains) {
    require(!chains.empty(), "negative_stats: no chains");
    const std::size_t d = chains.front().v.size();
    const std::size_t n = chains.front().h.size();
    SuffStats st = SuffStats::zeros(d, n);
    const double inv = 1.0 / static_cast<double>(chains.size());
    for (const ChainState& c : chains) {
        for (std::size_t i = 0; i < d; ++i)
            if (c.v[i]) st.v[i] += inv;
        for (std::size_t j = 0; j < n; ++j) {
            if (!c.h[j]) continue;
            st.h[j] += inv;
            for (std::size_t i = 0; i < d; ++i)
                if (c.v[i]) st.vh(j, i) += inv;
        }
    }
    return st;
}

inline SuffStats negative_stats(const ModelStats& exact) {
    SuffStats st;
    st.v = exact.v_mean;
    st.h = exact.h_mean;
    st.vh = exact.vh_mean;
    return st;
}

/// Owns the constraint spec, the live snapshot, and the weight-noise stream.
/// refresh() is called after every parameter change; the redraw counter backs
/// the one-snapshot-per-update invariant.
struct SnapshotManager {
    ConstraintSpec spec;
    RngStream noise_rng;
    NoisySnapshot snapshot;
    std::uint64_t redraws = 0;

    SnapshotManager(const RbmParams& params, ConstraintSpec spec_, std::uint64_t seed)
        : spec(std::move(spec_)), noise_rng(seed, stream_ids::kWeightNoise) {
        snapshot = make_snapshot(params, spec, noise_rng);
    }

    void refresh(const RbmParams& params) {
        snapshot = make_snapshot(params, spec, noise_rng);
        ++redraws;
    }
};

/// One PCD update: advance the persistent chains (negative phase), apply the
/// gradient step theta += lr * (positive - negative), enforce clip-then-mask,
/// and redraw the weight noise for the changed parameters.
inline void pcd_update(RbmParams& params, const std::vector<BitVec>& batch,
                       std::vector<ChainState>& chains, const TrainConfig& config,
                       SnapshotManager& snapshots) {
    switch (config.negative_phase) {
        case NegativePhase::simulated_physical:
            physical_sample(snapshots.snapshot, chains, config.gibbs_steps, config.threads);
            break;
        case NegativePhase::plain_gibbs:
            parallel_for(chains.size(), config.threads,
                         [&](std::size_t i) { run_chain(params, chains[i], config.gibbs_steps); });
            break;
        case NegativePhase::exact_enumeration:
            break;
    }
    const SuffStats pos = positive_stats(params, batch);
    const SuffStats neg = config.negative_phase == NegativePhase::exact_enumeration
                              ? negative_stats(exact_model_stats(params))
                              : negative_stats(chains);
    const double lr = config.learning_rate;
    for (std::size_t k = 0; k < params.w.data.size(); ++k)
        params.w.data[k] += lr * (pos.vh.data[k] - neg.vh.data[k]);
    for (std::size_t i = 0; i < params.num_visible; ++i) params.vbias[i] += lr * (pos.v[i] - neg.v[i]);
    for (std::size_t j = 0; j < params.num_hidden; ++j) params.hbias[j] += lr * (pos.h[j] - neg.h[j]);
    if (!params.all_finite())
        throw std::runtime_error("pcd_update: non-finite parameter after update " +
                                 std::to_string(snapshots.redraws + 1) + "; lower the learning rate");
    params = enforce_constraints(std::move(params), snapshots.spec);
    snapshots.refresh(params);
}

/// Turns a dataset row into one binary presentation; the default is plain
/// per-entry Bernoulli binarization. Pixel mappings substitute their own.
using Presenter = std::function<BitVec(const Vector&, RngStream&)>;

/// Shuffled mini-batch PCD training with per-presentation Bernoulli
/// binarization. Deterministic for a fixed config (including thread count).
inline std::pair<RbmParams, TrainLog> train(const Dataset& data, std::size_t num_hidden,
                                            const TrainConfig& config, const Presenter& presenter = {}) {
    config.validate();
    require(data.num_examples() > 0, "train: empty dataset");
    auto present = [&](const Vector& row, RngStream& rng) {
        return presenter ? presenter(row, rng) : binarize(row, rng);
    };
    std::size_t d = data.dim();
    if (presenter) {
        RngStream probe(config.seed, stream_ids::kInit ^ 0xff);
        d = presenter(data.row(0), probe).size();
    }
    ConstraintSpec spec = config.constraint;
    if (spec.has_mask())
        require(spec.mask.num_hidden == num_hidden && spec.mask.num_visible == d,
                "train: constraint mask shape does not match model");

    RngStream init_rng(config.seed, stream_ids::kInit);
    RbmParams params = RbmParams::gaussian_init(d, num_hidden, config.init_weight_stddev, init_rng);
    params = enforce_constraints(std::move(params), spec);

    std::vector<ChainState> chains = make_chains(d, num_hidden, config.num_chains, config.seed);
    SnapshotManager snapshots(params, spec, config.seed);
    RngStream shuffle_rng(config.seed, stream_ids::kShuffle);
    RngStream binarize_rng(config.seed, stream_ids::kBinarize);

    // Fixed binarization for epoch NLL logging; training presentations are
    // re-binarized every time.
    std::vector<BitVec> nll_data;
    const bool can_exact = std::min(d, num_hidden) <= kMaxEnumeratedLayer;
    if (config.log_exact_nll && can_exact) {
        RngStream eval_rng(config.seed, stream_ids::kEvalBinarize);
        nll_data.reserve(data.num_examples());
        for (std::size_t t = 0; t < data.num_examples(); ++t)
            nll_data.push_back(present(data.row(t), eval_rng));
    }

    TrainLog log;
    std::vector<std::size_t> order(data.num_examples());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::uint64_t epoch_seed = shuffle_rng.next_u64();
        // Fisher-Yates on a per-epoch stream.
        RngStream perm(epoch_seed, stream_ids::kShuffle);
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(perm.next_u64() % i);
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            std::vector<BitVec> batch;
            batch.reserve(end - begin);
            for (std::size_t t = begin; t < end; ++t)
                batch.push_back(present(data.row(order[t]), binarize_rng));
            pcd_update(params, batch, chains, config, snapshots);
            ++log.num_updates;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.epoch_seed = epoch_seed;
        rec.w_norm = params.w.frobenius_norm();
        rec.vbias_norm = l2_norm(params.vbias);
        rec.hbias_norm = l2_norm(params.hbias);
        if (!nll_data.empty()) {
            rec.has_exact_nll = true;
            rec.exact_nll = exact_nll(params, nll_data);
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log.epochs.push_back(rec);
    }
    log.weight_noise_redraws = snapshots.redraws;
    return {std::move(params), std::move(log)};
}

/// Full-batch ascent on the exact log-likelihood gradient; reference training
/// for small models.
inline RbmParams exact_gradient_ascent(const std::vector<BitVec>& data, std::size_t num_hidden,
                                       std::size_t steps, double learning_rate,
                                       const ConstraintSpec& spec, std::uint64_t seed,
                                       double init_weight_stddev = 0.01) {
    require(!data.empty(), "exact_gradient_ascent: empty dataset");
    RngStream init_rng(seed, stream_ids::kInit);
    RbmParams params =
        RbmParams::gaussian_init(data.front().size(), num_hidden, init_weight_stddev, init_rng);
    params = enforce_constraints(std::move(params), spec);
    for (std::size_t step = 0; step < steps; ++step) {
        const RbmGradient g = exact_grad(params, data);
        for (std::size_t k = 0; k < params.w.data.size(); ++k) params.w.data[k] += learning_rate * g.w.data[k];
        for (std::size_t i = 0; i < params.num_visible; ++i) params.vbias[i] += learning_rate * g.vbias[i];
        for (std::size_t j = 0; j < params.num_hidden; ++j) params.hbias[j] += learning_rate * g.hbias[j];
        params = enforce_constraints(std::move(params), spec);
    }
    return params;
}

}  // namespace prbm
