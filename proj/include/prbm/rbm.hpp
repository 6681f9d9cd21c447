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
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "prbm/matrix.hpp"
#include "prbm/rng.hpp"

namespace prbm {

/// Binary RBM over v in {0,1}^D (visible) and h in {0,1}^N (hidden) with
/// energy E(v,h) = -vbias.v - hbias.h - h^T W v and p(v,h) = e^{-E} / Z.
struct RbmParams {
    std::size_t num_visible = 0;
    std::size_t num_hidden = 0;
    Matrix w;       // num_hidden x num_visible
    Vector vbias;   // length num_visible
    Vector hbias;   // length num_hidden

    static RbmParams zeros(std::size_t d, std::size_t n) {
        RbmParams p;
        p.num_visible = d;
        p.num_hidden = n;
        p.w = Matrix(n, d, 0.0);
        p.vbias.assign(d, 0.0);
        p.hbias.assign(n, 0.0);
        return p;
    }

    /// Gaussian(0, stddev^2) weights, zero biases.
    static RbmParams gaussian_init(std::size_t d, std::size_t n, double stddev, RngStream& rng) {
        RbmParams p = zeros(d, n);
        for (double& x : p.w.data) x = rng.gaussian(stddev);
        return p;
    }

    bool all_finite() const { return w.all_finite() && prbm::all_finite(vbias) && prbm::all_finite(hbias); }

    void check_shapes() const {
        require(num_visible > 0 && num_hidden > 0, "RbmParams: dimensions must be positive");
        require(w.rows == num_hidden && w.cols == num_visible, "RbmParams: W must be num_hidden x num_visible");
        require(vbias.size() == num_visible && hbias.size() == num_hidden, "RbmParams: bias lengths inconsistent");
    }
};

struct BinaryState {
    BitVec v;
    BitVec h;
};

/// Numerically stable logistic function. Beyond |x| ~ 37 the result rounds to
/// exactly 0 or 1 in double precision; samplers must tolerate saturated
/// probabilities.
inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// log(1 + e^x) without overflow.
inline double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

inline double logsumexp(const Vector& xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Low bits of `index` spread over a bit vector of length n (bit 0 first).
inline BitVec bits_from_index(std::uint64_t index, std::size_t n) {
    BitVec b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>((index >> i) & 1u);
    return b;
}

inline double energy(const RbmParams& p, const BinaryState& s) {
    require(s.v.size() == p.num_visible && s.h.size() == p.num_hidden, "energy: state/param dimension mismatch");
    double e = 0.0;
    for (std::size_t i = 0; i < p.num_visible; ++i)
        if (s.v[i]) e -= p.vbias[i];
    for (std::size_t j = 0; j < p.num_hidden; ++j) {
        if (!s.h[j]) continue;
        e -= p.hbias[j];
        const double* row = p.w.data.data() + j * p.num_visible;
        for (std::size_t i = 0; i < p.num_visible; ++i)
            if (s.v[i]) e -= row[i];
    }
    return e;
}

/// p(h_j = 1 | v) = sigmoid(hbias + W v), elementwise.
inline Vector cond_hidden(const RbmParams& p, const BitVec& v) {
    require(v.size() == p.num_visible, "cond_hidden: v dimension mismatch");
    Vector a = matvec(p.w, v);
    for (std::size_t j = 0; j < p.num_hidden; ++j) a[j] = sigmoid(a[j] + p.hbias[j]);
    return a;
}

/// p(v_i = 1 | h) = sigmoid(vbias + W^T h), elementwise.
inline Vector cond_visible(const RbmParams& p, const BitVec& h) {
    require(h.size() == p.num_hidden, "cond_visible: h dimension mismatch");
    Vector a = matvec_t(p.w, h);
    for (std::size_t i = 0; i < p.num_visible; ++i) a[i] = sigmoid(a[i] + p.vbias[i]);
    return a;
}

/// Unnormalized log marginal: ln sum_h e^{-E(v,h)} = vbias.v + sum_j softplus(hbias_j + (Wv)_j).
inline double log_unnorm_marginal(const RbmParams& p, const BitVec& v) {
    require(v.size() == p.num_visible, "log_unnorm_marginal: v dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.num_visible; ++i)
        if (v[i]) s += p.vbias[i];
    const Vector a = matvec(p.w, v);
    for (std::size_t j = 0; j < p.num_hidden; ++j) s += softplus(a[j] + p.hbias[j]);
    return s;
}

/// Largest layer size exact_log_z will enumerate (2^24 states keeps oracle
/// runs in seconds).
inline constexpr std::size_t kMaxEnumeratedLayer = 24;

namespace detail {

// Symmetric view: enumerating over h instead of v is the same sum with the
// roles of (vbias, W) and (hbias, W^T) swapped.
inline double layer_sum_log_z(const Matrix& w, const Vector& enum_bias, const Vector& sum_bias,
                              bool enumerate_rows) {
    const std::size_t n_enum = enum_bias.size();
    const std::size_t n_sum = sum_bias.size();
    const std::uint64_t count = std::uint64_t(1) << n_enum;
    // Streaming logsumexp: rescale the running sum whenever the max moves.
    double run_max = -std::numeric_limits<double>::infinity();
    double run_sum = 0.0;
    BitVec state(n_enum, 0);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        for (std::size_t i = 0; i < n_enum; ++i) state[i] = static_cast<std::uint8_t>((idx >> i) & 1u);
        double term = 0.0;
        for (std::size_t i = 0; i < n_enum; ++i)
            if (state[i]) term += enum_bias[i];
        const Vector act = enumerate_rows ? matvec_t(w, state) : matvec(w, state);
        for (std::size_t j = 0; j < n_sum; ++j) term += softplus(act[j] + sum_bias[j]);
        if (term <= run_max) {
            run_sum += std::exp(term - run_max);
        } else {
            run_sum = run_sum * std::exp(run_max - term) + 1.0;
            run_max = term;
        }
    }
    return run_max + std::log(run_sum);
}

}  // namespace detail

/// Exact ln Z by enumerating the smaller layer and summing the other
/// analytically. Throws when min(D, N) exceeds the enumeration bound.
inline double exact_log_z(const RbmParams& p) {
    p.check_shapes();
    require(std::min(p.num_visible, p.num_hidden) <= kMaxEnumeratedLayer,
            "exact_log_z: min(num_visible, num_hidden) exceeds enumeration bound " +
                std::to_string(kMaxEnumeratedLayer));
    if (p.num_hidden <= p.num_visible)
        return detail::layer_sum_log_z(p.w, p.hbias, p.vbias, /*enumerate_rows=*/true);
    return detail::layer_sum_log_z(p.w, p.vbias, p.hbias, /*enumerate_rows=*/false);
}

/// Mean negative log-likelihood (nats per example) of binary visible vectors.
inline double exact_nll(const RbmParams& p, const std::vector<BitVec>& data) {
    require(!data.empty(), "exact_nll: empty dataset");
    const double log_z = exact_log_z(p);
    double s = 0.0;
    for (const BitVec& v : data) s += log_unnorm_marginal(p, v) - log_z;
    return -s / static_cast<double>(data.size());
}

/// Exact model expectations <v>, <h>, <h v^T> by enumerating the smaller layer.
struct ModelStats {
    Vector v_mean;   // length D
    Vector h_mean;   // length N
    Matrix vh_mean;  // N x D, <h_j v_i>
};

inline ModelStats exact_model_stats(const RbmParams& p) {
    p.check_shapes();
    require(std::min(p.num_visible, p.num_hidden) <= kMaxEnumeratedLayer,
            "exact_model_stats: layer too large to enumerate");
    const double log_z = exact_log_z(p);
    ModelStats st;
    st.v_mean.assign(p.num_visible, 0.0);
    st.h_mean.assign(p.num_hidden, 0.0);
    st.vh_mean = Matrix(p.num_hidden, p.num_visible, 0.0);

    const bool enum_hidden = p.num_hidden <= p.num_visible;
    const std::size_t n_enum = enum_hidden ? p.num_hidden : p.num_visible;
    const std::uint64_t count = std::uint64_t(1) << n_enum;
    BitVec state(n_enum, 0);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        for (std::size_t i = 0; i < n_enum; ++i) state[i] = static_cast<std::uint8_t>((idx >> i) & 1u);
        if (enum_hidden) {
            // p(h) with v summed out; v_i | h is conditionally independent.
            double lf = 0.0;
            for (std::size_t j = 0; j < p.num_hidden; ++j)
                if (state[j]) lf += p.hbias[j];
            const Vector act = matvec_t(p.w, state);
            Vector pv(p.num_visible);
            for (std::size_t i = 0; i < p.num_visible; ++i) {
                const double x = act[i] + p.vbias[i];
                lf += softplus(x);
                pv[i] = sigmoid(x);
            }
            const double prob = std::exp(lf - log_z);
            for (std::size_t i = 0; i < p.num_visible; ++i) st.v_mean[i] += prob * pv[i];
            for (std::size_t j = 0; j < p.num_hidden; ++j) {
                if (!state[j]) continue;
                st.h_mean[j] += prob;
                for (std::size_t i = 0; i < p.num_visible; ++i) st.vh_mean(j, i) += prob * pv[i];
            }
        } else {
            double lf = 0.0;
            for (std::size_t i = 0; i < p.num_visible; ++i)
                if (state[i]) lf += p.vbias[i];
            const Vector act = matvec(p.w, state);
            Vector ph(p.num_hidden);
            for (std::size_t j = 0; j < p.num_hidden; ++j) {
                const double x = act[j] + p.hbias[j];
                lf += softplus(x);
                ph[j] = sigmoid(x);
            }
            const double prob = std::exp(lf - log_z);
            for (std::size_t j = 0; j < p.num_hidden; ++j) st.h_mean[j] += prob * ph[j];
            for (std::size_t i = 0; i < p.num_visible; ++i) {
                if (!state[i]) continue;
                st.v_mean[i] += prob;
                for (std::size_t j = 0; j < p.num_hidden; ++j) st.vh_mean(j, i) += prob * ph[j];
            }
        }
    }
    return st;
}

/// Gradient of the mean log-likelihood, same shape as the parameters.
struct RbmGradient {
    Matrix w;
    Vector vbias;
    Vector hbias;
};

/// Positive phase uses exact conditionals p(h|v_t); negative phase uses exact
/// model expectations by enumeration.
inline RbmGradient exact_grad(const RbmParams& p, const std::vector<BitVec>& data) {
    require(!data.empty(), "exact_grad: empty dataset");
    const ModelStats neg = exact_model_stats(p);
    RbmGradient g;
    g.w = Matrix(p.num_hidden, p.num_visible, 0.0);
    g.vbias.assign(p.num_visible, 0.0);
    g.hbias.assign(p.num_hidden, 0.0);
    const double inv_t = 1.0 / static_cast<double>(data.size());
    for (const BitVec& v : data) {
        require(v.size() == p.num_visible, "exact_grad: data dimension mismatch");
        const Vector ph = cond_hidden(p, v);
        for (std::size_t i = 0; i < p.num_visible; ++i)
            if (v[i]) g.vbias[i] += inv_t;
        for (std::size_t j = 0; j < p.num_hidden; ++j) {
            g.hbias[j] += inv_t * ph[j];
            for (std::size_t i = 0; i < p.num_visible; ++i)
                if (v[i]) g.w(j, i) += inv_t * ph[j];
        }
    }
    for (std::size_t i = 0; i < p.num_visible; ++i) g.vbias[i] -= neg.v_mean[i];
    for (std::size_t j = 0; j < p.num_hidden; ++j) g.hbias[j] -= neg.h_mean[j];
    for (std::size_t k = 0; k < g.w.data.size(); ++k) g.w.data[k] -= neg.vh_mean.data[k];
    return g;
}

}  // namespace prbm
