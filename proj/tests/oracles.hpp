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

// Independent brute-force reference implementations. These deliberately avoid
// the library's layer-sum / mean-field shortcuts: everything here is a plain
// sum over all 2^(D+N) joint states, so a bug in the production code paths
// cannot hide in the oracle.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "prbm/ising.hpp"
#include "prbm/rbm.hpp"

namespace oracle {

using prbm::BinaryState;
using prbm::BitVec;
using prbm::RbmParams;
using prbm::Vector;

inline BitVec nth_bits(std::uint64_t n, std::size_t len) {
    BitVec b(len);
    for (std::size_t i = 0; i < len; ++i) b[i] = static_cast<std::uint8_t>((n >> i) & 1u);
    return b;
}

/// Explicit triple loop over the energy definition.
inline double energy(const RbmParams& p, const BitVec& v, const BitVec& h) {
    double e = 0.0;
    for (std::size_t i = 0; i < p.num_visible; ++i) e -= p.vbias[i] * v[i];
    for (std::size_t j = 0; j < p.num_hidden; ++j) e -= p.hbias[j] * h[j];
    for (std::size_t j = 0; j < p.num_hidden; ++j)
        for (std::size_t i = 0; i < p.num_visible; ++i) e -= h[j] * p.w(j, i) * v[i];
    return e;
}

/// Unnormalized joint table over all 2^(D+N) states, indexed by
/// (h_index << D) | v_index.
inline Vector joint_unnormalized(const RbmParams& p) {
    const std::size_t d = p.num_visible;
    const std::size_t n = p.num_hidden;
    Vector table(std::size_t(1) << (d + n));
    for (std::uint64_t hv = 0; hv < table.size(); ++hv) {
        const BitVec v = nth_bits(hv & ((std::uint64_t(1) << d) - 1), d);
        const BitVec h = nth_bits(hv >> d, n);
        table[hv] = std::exp(-energy(p, v, h));
    }
    return table;
}

inline double log_z(const RbmParams& p) {
    double z = 0.0;
    for (double x : joint_unnormalized(p)) z += x;
    return std::log(z);
}

/// Normalized joint distribution table.
inline Vector joint(const RbmParams& p) {
    Vector table = joint_unnormalized(p);
    double z = 0.0;
    for (double x : table) z += x;
    for (double& x : table) x /= z;
    return table;
}

/// p(h_j = 1 | v) by enumerating every hidden state.
inline double cond_hidden_unit(const RbmParams& p, const BitVec& v, std::size_t j) {
    double num = 0.0, den = 0.0;
    for (std::uint64_t hi = 0; hi < (std::uint64_t(1) << p.num_hidden); ++hi) {
        const BitVec h = nth_bits(hi, p.num_hidden);
        const double w = std::exp(-energy(p, v, h));
        den += w;
        if (h[j]) num += w;
    }
    return num / den;
}

inline double cond_visible_unit(const RbmParams& p, const BitVec& h, std::size_t i) {
    double num = 0.0, den = 0.0;
    for (std::uint64_t vi = 0; vi < (std::uint64_t(1) << p.num_visible); ++vi) {
        const BitVec v = nth_bits(vi, p.num_visible);
        const double w = std::exp(-energy(p, v, h));
        den += w;
        if (v[i]) num += w;
    }
    return num / den;
}

/// p(v) by summing the joint over h.
inline double visible_marginal(const RbmParams& p, const BitVec& v) {
    double num = 0.0;
    for (std::uint64_t hi = 0; hi < (std::uint64_t(1) << p.num_hidden); ++hi)
        num += std::exp(-energy(p, v, nth_bits(hi, p.num_hidden)));
    return num / std::exp(log_z(p));
}

inline double nll(const RbmParams& p, const std::vector<BitVec>& data) {
    double s = 0.0;
    for (const BitVec& v : data) s -= std::log(visible_marginal(p, v));
    return s / static_cast<double>(data.size());
}

/// Central finite differences of exact_nll with respect to every parameter.
/// The NLL is -1/T sum log p, so the log-likelihood gradient is its negation.
struct FdGradient {
    prbm::Matrix w;
    Vector vbias;
    Vector hbias;
};

inline FdGradient fd_loglik_grad(const RbmParams& p, const std::vector<BitVec>& data, double step) {
    FdGradient g;
    g.w = prbm::Matrix(p.num_hidden, p.num_visible, 0.0);
    g.vbias.assign(p.num_visible, 0.0);
    g.hbias.assign(p.num_hidden, 0.0);
    auto central = [&](RbmParams& model, double* slot) {
        const double orig = *slot;
        *slot = orig + step;
        const double hi = prbm::exact_nll(model, data);
        *slot = orig - step;
        const double lo = prbm::exact_nll(model, data);
        *slot = orig;
        return -(hi - lo) / (2.0 * step);
    };
    for (std::size_t k = 0; k < g.w.data.size(); ++k) {
        RbmParams m = p;
        g.w.data[k] = central(m, &m.w.data[k]);
    }
    for (std::size_t i = 0; i < p.num_visible; ++i) {
        RbmParams m = p;
        g.vbias[i] = central(m, &m.vbias[i]);
    }
    for (std::size_t j = 0; j < p.num_hidden; ++j) {
        RbmParams m = p;
        g.hbias[j] = central(m, &m.hbias[j]);
    }
    return g;
}

inline double tv_distance(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

/// Random test model; mt19937 keeps the oracle's randomness independent of the
/// library's philox streams.
inline RbmParams random_params(std::size_t d, std::size_t n, double w_scale, double b_scale,
                               std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    RbmParams p = RbmParams::zeros(d, n);
    for (double& x : p.w.data) x = w_scale * dist(gen);
    for (double& x : p.vbias) x = b_scale * dist(gen);
    for (double& x : p.hbias) x = b_scale * dist(gen);
    return p;
}

inline std::vector<BitVec> all_visible_states(std::size_t d) {
    std::vector<BitVec> out;
    for (std::uint64_t i = 0; i < (std::uint64_t(1) << d); ++i) out.push_back(nth_bits(i, d));
    return out;
}

}  // namespace oracle
