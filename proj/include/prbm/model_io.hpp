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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "prbm/chimera.hpp"
#include "prbm/constraints.hpp"
#include "prbm/matrix.hpp"
#include "prbm/rbm.hpp"

namespace prbm {

// --- PRBM-MODL file format ---------------------------------------------------
// magic "PRBM-MODL", version u32, D u32, N u32, then vbias (D), hbias (N) and
// W row-major (N*D) as little-endian 64-bit floats, then a length-prefixed
// UTF-8 metadata block holding the constraint spec as key=value lines.

namespace detail {

inline constexpr char kModelMagic[9] = {'P', 'R', 'B', 'M', '-', 'M', 'O', 'D', 'L'};
inline constexpr std::uint32_t kModelVersion = 1;

inline void write_f64_le(std::ostream& os, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(bits >> (8 * i));
    os.write(b, 8);
}

inline double read_f64_le(std::istream& is, const std::string& what) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("truncated file while reading " + what);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double x;
    std::memcpy(&x, &bits, sizeof(x));
    return x;
}

inline std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream ss;
    ss.precision(17);
    ss << x;
    return ss.str();
}

inline double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::stod(s);
}

inline std::string constraint_metadata(const ConstraintSpec& spec) {
    std::ostringstream ss;
    ss << "sigma_w=" << format_double(spec.sigma_w) << "\n";
    ss << "sigma_b=" << format_double(spec.sigma_b) << "\n";
    ss << "cap=" << format_double(spec.magnitude_cap) << "\n";
    ss << "mask=" << (spec.has_mask() ? spec.mask.provenance : std::string("dense")) << "\n";
    ss << "mask_density=" << format_double(spec.has_mask() ? spec.mask.density() : 1.0) << "\n";
    return ss.str();
}

/// Rebuilds a mask from its provenance string.
inline ConnectivityMask mask_from_provenance(const std::string& prov, std::size_t num_visible,
                                             std::size_t num_hidden) {
    if (prov == "dense") return dense_mask(num_hidden, num_visible);
    if (prov.rfind("file:", 0) == 0) return load_mask(prov.substr(5));
    if (prov.rfind("random_drop(", 0) == 0) {
        double p = 0.0;
        unsigned long long seed = 0;
        if (std::sscanf(prov.c_str(), "random_drop(p=%lf,seed=%llu)", &p, &seed) != 2)
            throw std::runtime_error("cannot parse mask provenance: " + prov);
        return random_drop_mask(num_visible, num_hidden, p, seed);
    }
    if (prov.rfind("chimera(", 0) == 0) {
        unsigned long long m = 0, n = 0, l = 0;
        if (std::sscanf(prov.c_str(), "chimera(%llu,%llu,%llu)", &m, &n, &l) != 3)
            throw std::runtime_error("cannot parse mask provenance: " + prov);
        const ChimeraGraph g = build_chimera(m, n, l);
        const Bipartition part = bipartition(g);
        ConnectivityMask mask = chimera_mask(g, part);
        require(mask.num_visible == num_visible && mask.num_hidden == num_hidden,
                "chimera mask from provenance does not match model dimensions");
        return mask;
    }
    throw std::runtime_error("unknown mask provenance: " + prov);
}

inline ConstraintSpec constraint_from_metadata(const std::string& text, std::size_t num_visible,
                                               std::size_t num_hidden) {
    ConstraintSpec spec;
    std::istringstream ss(text);
    std::string line;
    std::string mask_prov = "dense";
    while (std::getline(ss, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "sigma_w")
            spec.sigma_w = parse_double(value);
        else if (key == "sigma_b")
            spec.sigma_b = parse_double(value);
        else if (key == "cap")
            spec.magnitude_cap = parse_double(value);
        else if (key == "mask")
            mask_prov = value;
        // mask_density is informational
    }
    if (mask_prov != "dense") spec.mask = mask_from_provenance(mask_prov, num_visible, num_hidden);
    return spec;
}

}  // namespace detail

inline void save_model(const std::string& path, const RbmParams& params, const ConstraintSpec& spec) {
    params.check_shapes();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_model: cannot open " + path);
    os.write(detail::kModelMagic, sizeof(detail::kModelMagic));
    detail::write_u32_le(os, detail::kModelVersion);
    detail::write_u32_le(os, static_cast<std::uint32_t>(params.num_visible));
    detail::write_u32_le(os, static_cast<std::uint32_t>(params.num_hidden));
    for (double x : params.vbias) detail::write_f64_le(os, x);
    for (double x : params.hbias) detail::write_f64_le(os, x);
    for (double x : params.w.data) detail::write_f64_le(os, x);
    const std::string meta = detail::constraint_metadata(spec);
    detail::write_u32_le(os, static_cast<std::uint32_t>(meta.size()));
    os.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    if (!os) throw std::runtime_error("save_model: write failed for " + path);
}

inline std::pair<RbmParams, ConstraintSpec> load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_model: cannot open " + path);
    char magic[sizeof(detail::kModelMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, detail::kModelMagic, sizeof(magic)) != 0)
        throw std::runtime_error("load_model: bad magic in " + path + " (expected PRBM-MODL)");
    const std::uint32_t version = detail::read_u32_le(is, "model version");
    if (version != detail::kModelVersion)
        throw std::runtime_error("load_model: unsupported version " + std::to_string(version) + " in " + path);
    RbmParams params;
    params.num_visible = detail::read_u32_le(is, "model D");
    params.num_hidden = detail::read_u32_le(is, "model N");
    params.vbias.resize(params.num_visible);
    params.hbias.resize(params.num_hidden);
    params.w = Matrix(params.num_hidden, params.num_visible);
    for (double& x : params.vbias) x = detail::read_f64_le(is, "visible bias");
    for (double& x : params.hbias) x = detail::read_f64_le(is, "hidden bias");
    for (double& x : params.w.data) x = detail::read_f64_le(is, "weights");
    const std::uint32_t meta_len = detail::read_u32_le(is, "metadata length");
    std::string meta(meta_len, '\0');
    is.read(meta.data(), meta_len);
    if (!is) throw std::runtime_error("load_model: truncated metadata in " + path);
    const ConstraintSpec spec = detail::constraint_from_metadata(meta, params.num_visible, params.num_hidden);
    return {std::move(params), spec};
}

/// Binary PGM (P5), maxval 255, intensity = round(255*value) with half values
/// rounding up.
inline void write_pgm(const Matrix& image, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_pgm: cannot open " + path);
    os << "P5\n" << image.cols << " " << image.rows << "\n255\n";
    for (double v : image.data) {
        require(v >= 0.0 && v <= 1.0, "write_pgm: intensity outside [0,1]");
        const long byte = std::lround(255.0 * v);
        os.put(static_cast<char>(static_cast<unsigned char>(byte)));
    }
    if (!os) throw std::runtime_error("write_pgm: write failed for " + path);
}

/// Lays equally sized image tiles into one grid image with a 1px separator.
inline Matrix tile_images(const std::vector<Matrix>& tiles, std::size_t tiles_per_row) {
    require(!tiles.empty(), "tile_images: no tiles");
    require(tiles_per_row >= 1, "tile_images: tiles_per_row must be >= 1");
    const std::size_t th = tiles.front().rows;
    const std::size_t tw = tiles.front().cols;
    const std::size_t nrows = (tiles.size() + tiles_per_row - 1) / tiles_per_row;
    Matrix grid(nrows * (th + 1) + 1, tiles_per_row * (tw + 1) + 1, 0.0);
    for (std::size_t t = 0; t < tiles.size(); ++t) {
        require(tiles[t].rows == th && tiles[t].cols == tw, "tile_images: tiles differ in shape");
        const std::size_t r0 = (t / tiles_per_row) * (th + 1) + 1;
        const std::size_t c0 = (t % tiles_per_row) * (tw + 1) + 1;
        for (std::size_t r = 0; r < th; ++r)
            for (std::size_t c = 0; c < tw; ++c) grid(r0 + r, c0 + c) = tiles[t](r, c);
    }
    return grid;
}

}  // namespace prbm
