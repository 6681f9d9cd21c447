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
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "prbm/matrix.hpp"
#include "prbm/rbm.hpp"
#include "prbm/rng.hpp"

namespace prbm {

/// Which weight entries a hardware topology permits. Biases are never masked:
/// the topology restricts couplings only. Immutable once built.
struct ConnectivityMask {
    std::size_t num_hidden = 0;   // rows, matches W
    std::size_t num_visible = 0;  // cols
    std::vector<std::uint8_t> allowed;  // row-major num_hidden * num_visible, 0/1
    std::string provenance = "dense";

    bool at(std::size_t j, std::size_t i) const { return allowed[j * num_visible + i] != 0; }

    std::size_t allowed_count() const {
        std::size_t n = 0;
        for (std::uint8_t a : allowed) n += a;
        return n;
    }

    double density() const {
        return allowed.empty() ? 1.0 : static_cast<double>(allowed_count()) / static_cast<double>(allowed.size());
    }

    bool is_dense() const {
        return std::all_of(allowed.begin(), allowed.end(), [](std::uint8_t a) { return a != 0; });
    }
};

inline ConnectivityMask dense_mask(std::size_t num_hidden, std::size_t num_visible) {
    ConnectivityMask m;
    m.num_hidden = num_hidden;
    m.num_visible = num_visible;
    m.allowed.assign(num_hidden * num_visible, 1);
    m.provenance = "dense";
    return m;
}

/// Each entry independently disallowed with probability drop_prob.
inline ConnectivityMask random_drop_mask(std::size_t num_visible, std::size_t num_hidden,
                                         double drop_prob, std::uint64_t seed) {
    require(drop_prob >= 0.0 && drop_prob <= 1.0, "random_drop_mask: probability outside [0,1]");
    ConnectivityMask m;
    m.num_hidden = num_hidden;
    m.num_visible = num_visible;
    m.allowed.resize(num_hidden * num_visible);
    RngStream rng(seed, /*stream_id=*/0x6d61736bu);  // "mask"
    for (auto& a : m.allowed) a = rng.bernoulli(drop_prob) ? 0 : 1;
    m.provenance = "random_drop(p=" + std::to_string(drop_prob) + ",seed=" + std::to_string(seed) + ")";
    return m;
}

/// The three hardware limitations: Gaussian parameter noise (weights frozen
/// per parameter change, biases per sample), a magnitude cap, and a
/// connectivity mask. An empty mask means dense.
struct ConstraintSpec {
    double sigma_w = 0.0;
    double sigma_b = 0.0;
    double magnitude_cap = std::numeric_limits<double>::infinity();
    ConnectivityMask mask;

    void validate() const {
        require(sigma_w >= 0.0 && sigma_b >= 0.0, "ConstraintSpec: noise stddev must be nonnegative");
        require(magnitude_cap > 0.0, "ConstraintSpec: magnitude cap must be positive");
    }

    bool has_mask() const { return !mask.allowed.empty(); }

    static ConstraintSpec none() { return ConstraintSpec{}; }
};

/// Clamp every weight and bias to [-cap, +cap]. Applied in the RBM
/// parametrization, not the Ising one.
inline RbmParams clip_params(RbmParams p, double cap) {
    require(cap > 0.0, "clip_params: cap must be positive");
    auto clamp = [cap](double x) { return std::clamp(x, -cap, cap); };
    for (double& x : p.w.data) x = clamp(x);
    for (double& x : p.vbias) x = clamp(x);
    for (double& x : p.hbias) x = clamp(x);
    return p;
}

/// Zero out disallowed weight entries; biases untouched.
inline RbmParams apply_mask(RbmParams p, const ConnectivityMask& mask) {
    require(mask.num_hidden == p.num_hidden && mask.num_visible == p.num_visible,
            "apply_mask: mask shape does not match parameters");
    for (std::size_t k = 0; k < p.w.data.size(); ++k)
        if (!mask.allowed[k]) p.w.data[k] = 0.0;
    return p;
}

/// Both transforms, in the order the trainer enforces after each update.
inline RbmParams enforce_constraints(RbmParams p, const ConstraintSpec& spec) {
    if (std::isfinite(spec.magnitude_cap)) p = clip_params(std::move(p), spec.magnitude_cap);
    if (spec.has_mask()) p = apply_mask(std::move(p), spec.mask);
    return p;
}

// --- PRBM-MASK file format -------------------------------------------------
// magic "PRBM-MASK", version u32, D u32, N u32 (little-endian), then
// ceil(N*D/8) bytes of row-major bits, LSB first within each byte.

namespace detail {

inline constexpr char kMaskMagic[9] = {'P', 'R', 'B', 'M', '-', 'M', 'A', 'S', 'K'};
inline constexpr std::uint32_t kMaskVersion = 1;

inline void write_u32_le(std::ostream& os, std::uint32_t x) {
    char b[4] = {static_cast<char>(x), static_cast<char>(x >> 8), static_cast<char>(x >> 16),
                 static_cast<char>(x >> 24)};
    os.write(b, 4);
}

inline std::uint32_t read_u32_le(std::istream& is, const std::string& what) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("truncated file while reading " + what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace detail

inline void save_mask(const std::string& path, const ConnectivityMask& mask) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_mask: cannot open " + path);
    os.write(detail::kMaskMagic, sizeof(detail::kMaskMagic));
    detail::write_u32_le(os, detail::kMaskVersion);
    detail::write_u32_le(os, static_cast<std::uint32_t>(mask.num_visible));
    detail::write_u32_le(os, static_cast<std::uint32_t>(mask.num_hidden));
    const std::size_t nbits = mask.allowed.size();
    std::vector<std::uint8_t> packed((nbits + 7) / 8, 0);
    for (std::size_t k = 0; k < nbits; ++k)
        if (mask.allowed[k]) packed[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
    os.write(reinterpret_cast<const char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
    if (!os) throw std::runtime_error("save_mask: write failed for " + path);
}

inline ConnectivityMask load_mask(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_mask: cannot open " + path);
    char magic[sizeof(detail::kMaskMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, detail::kMaskMagic, sizeof(magic)) != 0)
        throw std::runtime_error("load_mask: bad magic in " + path + " (expected PRBM-MASK)");
    const std::uint32_t version = detail::read_u32_le(is, "mask version");
    if (version != detail::kMaskVersion)
        throw std::runtime_error("load_mask: unsupported version " + std::to_string(version));
    ConnectivityMask mask;
    mask.num_visible = detail::read_u32_le(is, "mask D");
    mask.num_hidden = detail::read_u32_le(is, "mask N");
    const std::size_t nbits = mask.num_visible * mask.num_hidden;
    std::vector<std::uint8_t> packed((nbits + 7) / 8);
    is.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
    if (!is) throw std::runtime_error("load_mask: truncated payload in " + path);
    mask.allowed.resize(nbits);
    for (std::size_t k = 0; k < nbits; ++k)
        mask.allowed[k] = (packed[k / 8] >> (k % 8)) & 1u;
    mask.provenance = "file:" + path;
    return mask;
}

}  // namespace prbm
