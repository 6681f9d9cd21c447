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

#include <cstdint>
#include <utility>
#include <vector>

#include "prbm/constraints.hpp"
#include "prbm/matrix.hpp"
#include "prbm/parallel.hpp"
#include "prbm/rbm.hpp"
#include "prbm/rng.hpp"

namespace prbm {

/// One persistent Gibbs chain. The chain owns its random stream, keyed by
/// (master seed, chain id), so chains can be advanced in any order or in
/// parallel with bit-identical results.
struct ChainState {
    BitVec v;
    BitVec h;
    RngStream rng;

    std::uint64_t stream_id() const { return rng.stream_id(); }
};

/// Chains with stream ids 0..count-1 and random binary starting states drawn
/// from each chain's own stream.
inline std::vector<ChainState> make_chains(std::size_t num_visible, std::size_t num_hidden,
                                           std::size_t count, std::uint64_t seed) {
    std::vector<ChainState> chains(count);
    for (std::size_t i = 0; i < count; ++i) {
        ChainState& c = chains[i];
        c.rng = RngStream(seed, i);
        c.v.resize(num_visible);
        c.h.resize(num_hidden);
        for (auto& b : c.v) b = c.rng.bernoulli(0.5) ? 1 : 0;
        for (auto& b : c.h) b = c.rng.bernoulli(0.5) ? 1 : 0;
    }
    return chains;
}

/// One full sweep: h' ~ p(h|v), then v' ~ p(v|h'). Hidden-first order is fixed.
inline void gibbs_step(const RbmParams& p, BitVec& v, BitVec& h, RngStream& rng) {
    require(v.size() == p.num_visible && h.size() == p.num_hidden, "gibbs_step: dimension mismatch");
    Vector act = matvec(p.w, v);
    for (std::size_t j = 0; j < p.num_hidden; ++j)
        h[j] = rng.bernoulli(sigmoid(act[j] + p.hbias[j])) ? 1 : 0;
    act = matvec_t(p.w, h);
    for (std::size_t i = 0; i < p.num_visible; ++i)
        v[i] = rng.bernoulli(sigmoid(act[i] + p.vbias[i])) ? 1 : 0;
}

inline void gibbs_step(const RbmParams& p, ChainState& chain) {
    gibbs_step(p, chain.v, chain.h, chain.rng);
}

inline void run_chain(const RbmParams& p, ChainState& chain, std::size_t k) {
    require(k >= 1, "run_chain: k must be >= 1");
    for (std::size_t step = 0; step < k; ++step) gibbs_step(p, chain);
}

/// Parameters as a simulated physical sampler sees them: weight noise drawn
/// once when the snapshot is made (the parameters changed), bias noise
/// redrawn for every sample. Masked weight entries are exactly zero — the
/// hardware has no coupler there, so neither base value nor noise survives.
struct NoisySnapshot {
    RbmParams base;
    Matrix w_noise;      // frozen Gaussian(0, sigma_w^2) draw, never masked
    double sigma_b = 0.0;
    Matrix w_effective;  // mask ⊙ (base.w + w_noise)
};

inline NoisySnapshot make_snapshot(const RbmParams& params, const ConstraintSpec& spec, RngStream& rng) {
    params.check_shapes();
    spec.validate();
    if (spec.has_mask())
        require(spec.mask.num_hidden == params.num_hidden && spec.mask.num_visible == params.num_visible,
                "make_snapshot: mask shape mismatch");
    NoisySnapshot snap;
    snap.base = params;
    snap.sigma_b = spec.sigma_b;
    snap.w_noise = Matrix(params.num_hidden, params.num_visible, 0.0);
    if (spec.sigma_w > 0.0)
        for (double& x : snap.w_noise.data) x = rng.gaussian(spec.sigma_w);
    snap.w_effective = snap.base.w;
    for (std::size_t k = 0; k < snap.w_effective.data.size(); ++k) {
        snap.w_effective.data[k] += snap.w_noise.data[k];
        if (spec.has_mask() && !spec.mask.allowed[k]) snap.w_effective.data[k] = 0.0;
    }
    return snap;
}

/// The parameters one sample request runs under: frozen effective weights plus
/// fresh bias noise. With sigma_b == 0 no random numbers are consumed, so the
/// caller's stream stays aligned with the noise-free path.
inline RbmParams effective_params(const NoisySnapshot& snap, RngStream& rng) {
    RbmParams p = snap.base;
    p.w = snap.w_effective;
    if (snap.sigma_b > 0.0) {
        for (double& x : p.vbias) x += rng.gaussian(snap.sigma_b);
        for (double& x : p.hbias) x += rng.gaussian(snap.sigma_b);
    }
    return p;
}

/// One sample request per chain: draw that chain's effective parameters (fresh
/// bias noise), then advance it k sweeps under them. Independent across
/// chains; parallel execution is bit-identical to sequential.
inline void physical_sample(const NoisySnapshot& snap, std::vector<ChainState>& chains, std::size_t k,
                            int threads = 1) {
    require(k >= 1, "physical_sample: k must be >= 1");
    parallel_for(chains.size(), threads, [&](std::size_t i) {
        ChainState& chain = chains[i];
        const RbmParams eff = effective_params(snap, chain.rng);
        for (std::size_t step = 0; step < k; ++step) gibbs_step(eff, chain);
    });
}

}  // namespace prbm
