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
#include <vector>

#include "prbm/matrix.hpp"
#include "prbm/rbm.hpp"

namespace prbm {

/// Ising model over s in {-1,+1}^(D+N) with E(s) = s^T J s + g^T s and
/// p(s) = e^{-E(s)} / Z. Spins are ordered visible first, then hidden. J is
/// stored upper-triangular (each pair contributes once) and, for converted
/// RBMs, is nonzero only across the visible/hidden partition.
struct IsingParams {
    std::size_t num_visible = 0;
    std::size_t num_hidden = 0;
    Matrix coupling;  // (D+N) x (D+N), entries only at i < j
    Vector field;     // length D+N

    std::size_t num_spins() const { return num_visible + num_hidden; }
};

struct SpinState {
    std::vector<std::int8_t> s;  // entries in {-1, +1}
};

/// Rewrites the RBM energy over spin variables s = 2*state - 1. The RBM form
/// carries minus signs (E = -b.v - c.h - h^T W v) while the Ising form carries
/// plus signs (E = s^T J s + g^T s), so the rescaled magnitudes (W/4, b/2 +
/// row sums, c/2 + column sums) enter J and g negated; the leftover additive
/// constant is dropped, leaving Boltzmann probabilities unchanged.
inline IsingParams to_ising(const RbmParams& p) {
    p.check_shapes();
    const std::size_t d = p.num_visible;
    const std::size_t n = p.num_hidden;
    IsingParams out;
    out.num_visible = d;
    out.num_hidden = n;
    out.coupling = Matrix(d + n, d + n, 0.0);
    out.field.assign(d + n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < d; ++i) out.coupling(i, d + j) = -p.w(j, i) / 4.0;
    for (std::size_t i = 0; i < d; ++i) {
        double col_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) col_sum += p.w(j, i);
        out.field[i] = -(p.vbias[i] / 2.0 + col_sum / 4.0);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double row_sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) row_sum += p.w(j, i);
        out.field[d + j] = -(p.hbias[j] / 2.0 + row_sum / 4.0);
    }
    return out;
}

/// E(s) = s^T J s + g^T s with J upper-triangular, each pair counted once.
inline double ising_energy(const IsingParams& ising, const SpinState& state) {
    const std::size_t n = ising.num_spins();
    require(state.s.size() == n, "ising_energy: spin dimension mismatch");
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        e += ising.field[i] * state.s[i];
        const double* row = ising.coupling.data.data() + i * n;
        for (std::size_t j = i + 1; j < n; ++j)
            if (row[j] != 0.0) e += row[j] * state.s[i] * state.s[j];
    }
    return e;
}

inline SpinState bits_to_spins(const BinaryState& state) {
    SpinState out;
    out.s.reserve(state.v.size() + state.h.size());
    for (std::uint8_t b : state.v) out.s.push_back(b ? 1 : -1);
    for (std::uint8_t b : state.h) out.s.push_back(b ? 1 : -1);
    return out;
}

/// -1 -> 0, +1 -> 1, split at the visible/hidden partition boundary.
inline BinaryState spins_to_bits(const SpinState& state, std::size_t num_visible, std::size_t num_hidden) {
    require(state.s.size() == num_visible + num_hidden, "spins_to_bits: partition does not cover spins");
    BinaryState out;
    out.v.reserve(num_visible);
    out.h.reserve(num_hidden);
    for (std::size_t i = 0; i < state.s.size(); ++i) {
        const std::int8_t s = state.s[i];
        require(s == 1 || s == -1, "spins_to_bits: entry outside {-1,+1} at index " + std::to_string(i));
        (i < num_visible ? out.v : out.h).push_back(s == 1 ? 1 : 0);
    }
    return out;
}

}  // namespace prbm
