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

#include <cstdio>

#include "oracles.hpp"
#include "prbm/constraints.hpp"

using namespace prbm;

TEST_CASE("clip clamps entries to the cap", "[constraints]") {
    RbmParams p = RbmParams::zeros(2, 1);
    p.w(0, 0) = 1.5;
    p.w(0, 1) = -2.0;
    p.vbias = {0.3, -0.1};
    p.hbias = {5.0};
    const RbmParams c = clip_params(p, 1.0);
    REQUIRE(c.w(0, 0) == 1.0);
    REQUIRE(c.w(0, 1) == -1.0);
    REQUIRE(c.vbias[0] == 0.3);
    REQUIRE(c.hbias[0] == 1.0);
    REQUIRE_THROWS_AS(clip_params(p, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(clip_params(p, -1.0), std::invalid_argument);
}

TEST_CASE("clip with a huge cap is the identity on a fresh model", "[constraints]") {
    RngStream rng(3, 0);
    const RbmParams p = RbmParams::gaussian_init(6, 4, 0.01, rng);
    const RbmParams c = clip_params(p, 100.0);
    REQUIRE(c.w.data == p.w.data);
    REQUIRE(c.vbias == p.vbias);
    REQUIRE(c.hbias == p.hbias);
}

TEST_CASE("masking zeroes disallowed weights and leaves biases alone", "[constraints]") {
    const RbmParams p = oracle::random_params(3, 2, 1.0, 0.8, 17);
    const RbmParams dense = apply_mask(p, dense_mask(2, 3));
    REQUIRE(dense.w.data == p.w.data);

    ConnectivityMask none = dense_mask(2, 3);
    none.allowed.assign(none.allowed.size(), 0);
    const RbmParams cut = apply_mask(p, none);
    for (double x : cut.w.data) REQUIRE(x == 0.0);
    REQUIRE(cut.vbias == p.vbias);
    REQUIRE(cut.hbias == p.hbias);

    ConnectivityMask bad = dense_mask(2, 4);
    REQUIRE_THROWS_AS(apply_mask(p, bad), std::invalid_argument);
}

TEST_CASE("an all-false mask factorizes the model", "[constraints]") {
    RbmParams p = oracle::random_params(2, 2, 1.3, 0.7, 19);
    ConnectivityMask none = dense_mask(2, 2);
    none.allowed.assign(none.allowed.size(), 0);
    p = apply_mask(p, none);
    const Vector joint = oracle::joint(p);
    // p(v,h) = prod_i sigmoid-style Bernoulli terms once the coupling is gone
    for (std::uint64_t hv = 0; hv < joint.size(); ++hv) {
        const BitVec v = oracle::nth_bits(hv & 3, 2);
        const BitVec h = oracle::nth_bits(hv >> 2, 2);
        double expect = 1.0;
        for (int i = 0; i < 2; ++i) {
            const double q = sigmoid(p.vbias[i]);
            expect *= v[i] ? q : 1.0 - q;
        }
        for (int j = 0; j < 2; ++j) {
            const double r = sigmoid(p.hbias[j]);
            expect *= h[j] ? r : 1.0 - r;
        }
        REQUIRE(joint[hv] == Approx(expect).margin(1e-12));
    }
}

TEST_CASE("random_drop_mask endpoints and seeding", "[constraints]") {
    const ConnectivityMask all = random_drop_mask(10, 10, 0.0, 5);
    REQUIRE(all.allowed_count() == 100);
    const ConnectivityMask nothing = random_drop_mask(10, 10, 1.0, 5);
    REQUIRE(nothing.allowed_count() == 0);
    REQUIRE_THROWS_AS(random_drop_mask(10, 10, 1.5, 5), std::invalid_argument);

    const ConnectivityMask a = random_drop_mask(784, 784, 0.5, 7);
    const ConnectivityMask b = random_drop_mask(784, 784, 0.5, 7);
    REQUIRE(a.allowed == b.allowed);
    const ConnectivityMask c = random_drop_mask(784, 784, 0.5, 8);
    REQUIRE(a.allowed != c.allowed);
}

TEST_CASE("random_drop_mask p=0.99 keeps about 1% of 784x784", "[constraints]") {
    const ConnectivityMask m = random_drop_mask(784, 784, 0.99, 123);
    const double fraction = m.density();
    REQUIRE(fraction > 0.009);
    REQUIRE(fraction < 0.011);
}

TEST_CASE("clip and mask are idempotent and commute", "[constraints]") {
    const RbmParams p = oracle::random_params(5, 4, 2.0, 1.5, 23);
    const ConnectivityMask mask = random_drop_mask(5, 4, 0.4, 11);
    const double cap = 1.2;

    const RbmParams clipped = clip_params(p, cap);
    REQUIRE(clip_params(clipped, cap).w.data == clipped.w.data);
    const RbmParams masked = apply_mask(p, mask);
    REQUIRE(apply_mask(masked, mask).w.data == masked.w.data);

    const RbmParams ab = apply_mask(clip_params(p, cap), mask);
    const RbmParams ba = clip_params(apply_mask(p, mask), cap);
    REQUIRE(ab.w.data == ba.w.data);
    REQUIRE(ab.vbias == ba.vbias);
    REQUIRE(ab.hbias == ba.hbias);
}

TEST_CASE("constraint spec validation", "[constraints]") {
    ConstraintSpec spec;
    spec.sigma_w = -0.1;
    REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.sigma_w = 0.0;
    spec.magnitude_cap = 0.0;
    REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.magnitude_cap = 1.0;
    REQUIRE_NOTHROW(spec.validate());
}

TEST_CASE("mask file round trip is bit-exact", "[constraints]") {
    const ConnectivityMask m = random_drop_mask(37, 19, 0.35, 77);
    const std::string path = "test_mask.prbm-mask";
    save_mask(path, m);
    const ConnectivityMask back = load_mask(path);
    REQUIRE(back.num_visible == m.num_visible);
    REQUIRE(back.num_hidden == m.num_hidden);
    REQUIRE(back.allowed == m.allowed);
    std::remove(path.c_str());
}

TEST_CASE("mask loader rejects malformed files", "[constraints]") {
    const std::string path = "test_mask_bad.prbm-mask";
    {
        std::ofstream os(path, std::ios::binary);
        os << "NOT-A-MASK-FILE";
    }
    REQUIRE_THROWS_WITH(load_mask(path), Catch::Contains("magic"));
    {
        std::ofstream os(path, std::ios::binary);
        os << "PRBM-MASK";  // header cut off
    }
    REQUIRE_THROWS_WITH(load_mask(path), Catch::Contains("truncated"));
    std::remove(path.c_str());
}
