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
#include <string>
#include <vector>

#include "prbm/constraints.hpp"
#include "prbm/matrix.hpp"
#include "prbm/parallel.hpp"
#include "prbm/rbm.hpp"
#include "prbm/rng.hpp"
#include "prbm/sampler.hpp"

namespace prbm {

struct AisConfig {
    std::size_t num_betas = 10000;     // linear schedule 0 -> 1, endpoints included
    std::size_t num_particles = 100;
    Vector base_visible_biases;        // empty means zeros
    int threads = 1;

    void validate() const {
        require(num_betas >= 2, "AisConfig: need at least two betas");
        require(num_particles >= 1, "AisConfig: need at least one particle");
    }
};

struct NllEstimate {
    double mean = 0.0;          // nats per example
    double std_err = 0.0;
    std::size_t num_mc_noise_draws = 0;
    std::string method = "exact";  // "exact" or "ais"
};

/// Visible biases of the AIS base model from data marginals, smoothed away
/// from 0/1.
inline Vector base_biases_from_data(const Matrix& rows) {
    Vector b(rows.cols, 0.0);
    for (std::size_t t = 0; t < rows.rows; ++t)
        for (std::size_t i = 0; i < rows.cols; ++i) b[i] += rows(t, i);
    for (std::size_t i = 0; i < rows.cols; ++i) {
        const double p = std::clamp(b[i] / std::max<std::size_t>(rows.rows, 1), 0.001, 0.999);
        b[i] = std::log(p / (1.0 - p));
    }
    return b;
}

namespace detail {

// ln f_beta(v) - ln f_beta_prev(v) for the interpolated model with visible
// bias (1-beta)*base + beta*target, weights beta*W, hidden bias beta*c.
// Written as a delta so the increment is exactly zero when the path is flat
// (target equals base, or zero activations).
inline double ais_log_f_delta(double beta, double beta_prev, double base_dot, double target_dot,
                              const Vector& hidden_act) {
    double s = (beta - beta_prev) * (target_dot - base_dot);
    for (double x : hidden_act) s += softplus(beta * x) - softplus(beta_prev * x);
    return s;
}

}  // namespace detail

/// Annealed importance sampling estimate of ln Z. The path starts at the
/// zero-weight base RBM (closed-form ln Z = sum_i softplus(b_i) + N ln 2) and
/// interpolates weights and biases linearly in beta; each particle does one
/// Gibbs sweep per temperature. Returns the log-mean of the importance
/// weights with a log-domain delta-method standard error.
inline std::pair<double, double> ais_log_z(const RbmParams& params, const AisConfig& config,
                                           std::uint64_t seed) {
    params.check_shapes();
    config.validate();
    const std::size_t d = params.num_visible;
    const std::size_t n = params.num_hidden;
    Vector base_bias = config.base_visible_biases;
    if (base_bias.empty()) base_bias.assign(d, 0.0);
    require(base_bias.size() == d, "ais_log_z: base bias length mismatch");

    double log_z_base = n * std::log(2.0);
    for (double b : base_bias) log_z_base += softplus(b);

    const std::size_t num_betas = config.num_betas;
    Vector log_w(config.num_particles, 0.0);
    parallel_for(config.num_particles, config.threads, [&](std::size_t particle) {
        RngStream rng(seed, particle);
        BitVec v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = rng.bernoulli(sigmoid(base_bias[i])) ? 1 : 0;
        double lw = 0.0;
        Vector hidden_act(n);
        auto refresh_hidden_act = [&] {
            const Vector act = matvec(params.w, v);
            for (std::size_t j = 0; j < n; ++j) hidden_act[j] = act[j] + params.hbias[j];
        };
        auto dots = [&](double& base_dot, double& target_dot) {
            base_dot = target_dot = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                if (v[i]) {
                    base_dot += base_bias[i];
                    target_dot += params.vbias[i];
                }
        };
        refresh_hidden_act();
        double base_dot = 0.0, target_dot = 0.0;
        dots(base_dot, target_dot);
        for (std::size_t t = 1; t < num_betas; ++t) {
            const double beta_prev = static_cast<double>(t - 1) / static_cast<double>(num_betas - 1);
            const double beta = static_cast<double>(t) / static_cast<double>(num_betas - 1);
            lw += detail::ais_log_f_delta(beta, beta_prev, base_dot, target_dot, hidden_act);
            // One Gibbs sweep at the new temperature.
            BitVec h(n);
            for (std::size_t j = 0; j < n; ++j) h[j] = rng.bernoulli(sigmoid(beta * hidden_act[j])) ? 1 : 0;
            const Vector vact = matvec_t(params.w, h);
            for (std::size_t i = 0; i < d; ++i) {
                const double field = (1.0 - beta) * base_bias[i] + beta * params.vbias[i] + beta * vact[i];
                v[i] = rng.bernoulli(sigmoid(field)) ? 1 : 0;
            }
            refresh_hidden_act();
            dots(base_dot, target_dot);
        }
        if (!std::isfinite(lw))
            throw std::runtime_error("ais_log_z: non-finite importance weight in particle " +
                                     std::to_string(particle));
        log_w[particle] = lw;
    });

    const double log_mean_w = logsumexp(log_w) - std::log(static_cast<double>(config.num_particles));
    double var = 0.0;
    for (double lw : log_w) {
        const double r = std::exp(lw - log_mean_w) - 1.0;  // mean of exp(lw - log_mean_w) is 1
        var += r * r;
    }
    var /= static_cast<double>(config.num_particles);
    const double std_err =
        config.num_particles > 1 ? std::sqrt(var / static_cast<double>(config.num_particles)) : 0.0;
    return {log_z_base + log_mean_w, std_err};
}

/// NLL = ln Z_hat - mean unnormalized log marginal over the (already
/// binarized) test set.
inline NllEstimate ais_nll(const RbmParams& params, const std::vector<BitVec>& testset,
                           const AisConfig& config, std::uint64_t seed) {
    require(!testset.empty(), "ais_nll: empty test set");
    const auto [log_z, log_z_err] = ais_log_z(params, config, seed);
    double mean_marginal = 0.0;
    for (const BitVec& v : testset) mean_marginal += log_unnorm_marginal(params, v);
    mean_marginal /= static_cast<double>(testset.size());
    NllEstimate est;
    est.mean = log_z - mean_marginal;
    est.std_err = log_z_err;
    est.method = "ais";
    return est;
}

inline NllEstimate exact_nll_estimate(const RbmParams& params, const std::vector<BitVec>& testset) {
    NllEstimate est;
    est.mean = exact_nll(params, testset);
    est.std_err = 0.0;
    est.method = "exact";
    return est;
}

/// Largest enumerable layer for which expected_nll_under_noise prefers the
/// exact route over AIS.
inline constexpr std::size_t kExactNllThreshold = 20;

/// Monte Carlo expectation of the NLL over parameter-noise instantiations.
/// Each draw freezes fresh weight noise and bias noise (masked entries stay
/// zero), then evaluates NLL exactly when a layer is small enough, otherwise
/// by AIS. Mirrors the multi-seed protocol used for noisy-parameter figures.
inline NllEstimate expected_nll_under_noise(const RbmParams& params, const ConstraintSpec& spec,
                                            const std::vector<BitVec>& testset, std::size_t num_draws,
                                            const AisConfig& config, std::uint64_t seed,
                                            std::size_t exact_threshold = kExactNllThreshold) {
    require(num_draws >= 1, "expected_nll_under_noise: num_draws must be >= 1");
    spec.validate();
    const bool use_exact = std::min(params.num_visible, params.num_hidden) <= exact_threshold;
    const bool noiseless = spec.sigma_w == 0.0 && spec.sigma_b == 0.0;

    auto evaluate = [&](const RbmParams& p, std::uint64_t draw_seed) {
        return use_exact ? exact_nll_estimate(p, testset)
                         : ais_nll(p, testset, config, draw_seed);
    };

    if (noiseless) {
        RbmParams p = spec.has_mask() ? apply_mask(params, spec.mask) : params;
        NllEstimate est = evaluate(p, mix_seed(seed, 0));
        est.num_mc_noise_draws = num_draws;
        return est;
    }

    Vector draws(num_draws, 0.0);
    std::string method = "exact";
    for (std::size_t draw = 0; draw < num_draws; ++draw) {
        RngStream rng(seed, draw);
        RbmParams noisy = params;
        if (spec.sigma_w > 0.0)
            for (double& x : noisy.w.data) x += rng.gaussian(spec.sigma_w);
        if (spec.has_mask()) noisy = apply_mask(std::move(noisy), spec.mask);
        if (spec.sigma_b > 0.0) {
            for (double& x : noisy.vbias) x += rng.gaussian(spec.sigma_b);
            for (double& x : noisy.hbias) x += rng.gaussian(spec.sigma_b);
        }
        const NllEstimate est = evaluate(noisy, mix_seed(seed, draw + 1));
        method = est.method;
        draws[draw] = est.mean;
    }
    double mean = 0.0;
    for (double x : draws) mean += x;
    mean /= static_cast<double>(num_draws);
    double var = 0.0;
    for (double x : draws) var += (x - mean) * (x - mean);
    NllEstimate est;
    est.mean = mean;
    est.std_err = num_draws > 1 ? std::sqrt(var / static_cast<double>(num_draws - 1) /
                                            static_cast<double>(num_draws))
                                : 0.0;
    est.num_mc_noise_draws = num_draws;
    est.method = method;
    return est;
}

/// Independent chains run from random states; each sample is the expected
/// value of the visible units given the final binary hidden state.
inline std::vector<Vector> sample_grid(const RbmParams& params, std::size_t n_samples,
                                       std::size_t gibbs_steps, std::uint64_t seed, int threads = 1) {
    params.check_shapes();
    std::vector<Vector> samples(n_samples);
    parallel_for(n_samples, threads, [&](std::size_t s) {
        ChainState chain;
        chain.rng = RngStream(seed, s);
        chain.v.resize(params.num_visible);
        chain.h.resize(params.num_hidden);
        for (auto& b : chain.v) b = chain.rng.bernoulli(0.5) ? 1 : 0;
        for (auto& b : chain.h) b = chain.rng.bernoulli(0.5) ? 1 : 0;
        for (std::size_t step = 0; step < gibbs_steps; ++step) gibbs_step(params, chain);
        samples[s] = cond_visible(params, chain.h);
    });
    return samples;
}

}  // namespace prbm
