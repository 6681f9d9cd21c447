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

#include <catch2/catch.hpp>

#include <cmath>

#include "oracles.hpp"
#include "prbm/ising.hpp"

using namespace prbm;

namespace {

// Normalized Boltzmann table of the Ising model over all joint states,
// indexed like the RBM oracle's joint: (h_index << D) | v_index.
Vector ising_joint(const IsingParams& ising) {
    const std::size_t d = ising.num_visible;
    const std::size_t n = ising.num_hidden;
    Vector table(std::size_t(1) << (d + n));
    double z = 0.0;
    for (std::uint64_t hv = 0; hv < table.size(); ++hv) {
        const BinaryState state{oracle::nth_bits(hv & ((1u << d) - 1), d), oracle::nth_bits(hv >> d, n)};
        table[hv] = std::exp(-ising_energy(ising, bits_to_spins(state)));
        z += table[hv];
    }
    for (double& x : table) x /= z;
    return table;
}

}  // namespace

TEST_CASE("to_ising maps zero to zero", "[ising]") {
    const IsingParams ising = to_ising(RbmParams::zeros(2, 3));
    for (double x : ising.coupling.data) REQUIRE(x == 0.0);
    for (double x : ising.field) REQUIRE(x == 0.0);
}

TEST_CASE("to_ising magnitudes follow the rescaling map", "[ising]") {
    RbmParams p = RbmParams::zeros(1, 1);
    p.w(0, 0) = 4.0;
    p.vbias[0] = 2.0;
    // rescaled magnitudes: W' = 1, b' = 2, c' = 1; embedded negated into the
    // plus-sign Ising energy form.
    const IsingParams ising = to_ising(p);
    REQUIRE(std::abs(ising.coupling(0, 1)) == Approx(1.0));
    REQUIRE(std::abs(ising.field[0]) == Approx(2.0));
    REQUIRE(std::abs(ising.field[1]) == Approx(1.0));
    REQUIRE(ising.coupling(0, 1) == Approx(-1.0));
    REQUIRE(ising.field[0] == Approx(-2.0));
    REQUIRE(ising.field[1] == Approx(-1.0));
}

TEST_CASE("coupling matrix is upper-triangular across the partition", "[ising]") {
    const RbmParams p = oracle::random_params(3, 2, 1.0, 0.8, 101);
    const IsingParams ising = to_ising(p);
    const std::size_t n = ising.num_spins();
    for (std::size_t i = 0; i < n; ++i) {
        REQUIRE(ising.coupling(i, i) == 0.0);
        for (std::size_t j = 0; j < i; ++j) REQUIRE(ising.coupling(i, j) == 0.0);
    }
    // visible-visible and hidden-hidden blocks are empty
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) REQUIRE(ising.coupling(i, j) == 0.0);
    for (std::size_t i = 3; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) REQUIRE(ising.coupling(i, j) == 0.0);
}

TEST_CASE("ising_energy by substitution", "[ising]") {
    IsingParams ising;
    ising.num_visible = 1;
    ising.num_hidden = 1;
    ising.coupling = Matrix(2, 2, 0.0);
    ising.field.assign(2, 0.0);
    SpinState s{{1, 1}};
    REQUIRE(ising_energy(ising, s) == 0.0);
    ising.coupling(0, 1) = 1.0;
    REQUIRE(ising_energy(ising, s) == Approx(1.0));
    s.s = {1, -1};
    REQUIRE(ising_energy(ising, s) == Approx(-1.0));
}

TEST_CASE("normalized probabilities agree state-by-state", "[ising]") {
    for (std::uint32_t seed = 0; seed < 10; ++seed) {
        const RbmParams p = oracle::random_params(3, 3, 1.0, 0.8, 200 + seed);
        const Vector rbm_joint = oracle::joint(p);
        const Vector ij = ising_joint(to_ising(p));
        for (std::size_t hv = 0; hv < rbm_joint.size(); ++hv)
            REQUIRE(ij[hv] == Approx(rbm_joint[hv]).margin(1e-10));
    }
}

TEST_CASE("energy offset is state-independent and matches the closed form", "[ising]") {
    const RbmParams p = oracle::random_params(3, 3, 1.2, 0.9, 301);
    const IsingParams ising = to_ising(p);
    double sum_w = 0.0, sum_b = 0.0, sum_c = 0.0;
    for (double x : p.w.data) sum_w += x;
    for (double x : p.vbias) sum_b += x;
    for (double x : p.hbias) sum_c += x;
    const double expected_offset = sum_b / 2.0 + sum_c / 2.0 + sum_w / 4.0;
    for (std::uint64_t vi = 0; vi < 8; ++vi)
        for (std::uint64_t hi = 0; hi < 8; ++hi) {
            const BinaryState state{oracle::nth_bits(vi, 3), oracle::nth_bits(hi, 3)};
            const double offset = ising_energy(ising, bits_to_spins(state)) - energy(p, state);
            REQUIRE(offset == Approx(expected_offset).margin(1e-10));
        }
}

TEST_CASE("spin/bit conversions", "[ising]") {
    const BinaryState a = spins_to_bits(SpinState{{-1, -1}}, 1, 1);
    REQUIRE(a.v == BitVec{0});
    REQUIRE(a.h == BitVec{0});
    const BinaryState b = spins_to_bits(SpinState{{1, -1}}, 1, 1);
    REQUIRE(b.v == BitVec{1});
    REQUIRE(b.h == BitVec{0});
    REQUIRE_THROWS_AS(spins_to_bits(SpinState{{1, 0}}, 1, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(spins_to_bits(SpinState{{1, 1, 1}}, 1, 1), std::invalid_argument);

    // round trip bits -> spins -> bits
    std::mt19937 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        BinaryState s;
        for (int i = 0; i < 5; ++i) s.v.push_back(gen() & 1);
        for (int j = 0; j < 4; ++j) s.h.push_back(gen() & 1);
        const BinaryState back = spins_to_bits(bits_to_spins(s), 5, 4);
        REQUIRE(back.v == s.v);
        REQUIRE(back.h == s.h);
    }
}
