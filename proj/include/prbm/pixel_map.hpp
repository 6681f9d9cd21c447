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
#include <fstream>
#include <string>
#include <vector>

#include "prbm/chimera.hpp"
#include "prbm/matrix.hpp"
#include "prbm/rng.hpp"

namespace prbm {

/// Ties image pixels to the visible units of a chimera-partitioned model.
///
/// pixel_blocks: cell (i,j)'s four visible units take the 2x2 pixel block at
/// rows 2i..2i+1, cols 2j..2j+1 in row-major order — a bijection.
///
/// extended_pixel_blocks: cell (i,j) owns the 4x4 window at rows 2i-1..2i+2,
/// cols 2j-1..2j+2; visible unit (a,b) covers the 2x2 pixel patch anchored at
/// window offset (2a,2b), truncated at the image border. Neighboring cells'
/// windows overlap, so an interior pixel is shared by four units.
struct PixelMapping {
    enum class Kind { pixel_blocks, extended_pixel_blocks };

    Kind kind = Kind::pixel_blocks;
    std::size_t image_height = 0;
    std::size_t image_width = 0;
    std::size_t num_units = 0;
    std::vector<std::vector<std::uint32_t>> unit_pixels;  // unit -> pixel linear indices (row*W + col)
    std::vector<std::vector<std::uint32_t>> pixel_units;  // pixel -> unit indices

    std::size_t num_pixels() const { return image_height * image_width; }

    std::string kind_name() const {
        return kind == Kind::pixel_blocks ? "pixel_blocks" : "extended_pixel_blocks";
    }
};

namespace detail {

// Visible units of each cell, in shore order; exactly one shore of every cell
// is visible under the checkerboard bipartition.
inline std::vector<std::vector<std::uint32_t>> cell_visible_units(const ChimeraGraph& g,
                                                                  const Bipartition& part) {
    std::vector<std::vector<std::uint32_t>> cells(g.grid_rows * g.grid_cols);
    for (std::size_t r = 0; r < g.grid_rows; ++r) {
        for (std::size_t c = 0; c < g.grid_cols; ++c) {
            auto& units = cells[r * g.grid_cols + c];
            for (int side = 0; side < 2; ++side) {
                const std::uint32_t first = g.node(r, c, side, 0);
                if (part.side[first] != 0) continue;
                for (std::size_t k = 0; k < g.shore; ++k) {
                    const std::uint32_t node = g.node(r, c, side, k);
                    require(part.side[node] == 0, "pixel mapping: shore not uniformly visible");
                    units.push_back(part.unit_index[node]);
                }
            }
            require(units.size() == g.shore, "pixel mapping: cell does not have exactly one visible shore");
        }
    }
    return cells;
}

inline void mapping_preconditions(std::size_t width, std::size_t height, const ChimeraGraph& g) {
    require(g.shore == 4, "pixel mapping: shore size must be 4");
    require(height == 2 * g.grid_rows && width == 2 * g.grid_cols,
            "pixel mapping: image " + std::to_string(width) + "x" + std::to_string(height) +
                " does not match cell grid " + std::to_string(g.grid_rows) + "x" +
                std::to_string(g.grid_cols));
}

inline void invert_unit_pixels(PixelMapping& m) {
    m.pixel_units.assign(m.num_pixels(), {});
    for (std::size_t u = 0; u < m.unit_pixels.size(); ++u)
        for (std::uint32_t px : m.unit_pixels[u]) m.pixel_units[px].push_back(static_cast<std::uint32_t>(u));
}

}  // namespace detail

inline PixelMapping pixel_blocks_mapping(std::size_t width, std::size_t height, const ChimeraGraph& g,
                                         const Bipartition& part) {
    detail::mapping_preconditions(width, height, g);
    PixelMapping m;
    m.kind = PixelMapping::Kind::pixel_blocks;
    m.image_height = height;
    m.image_width = width;
    m.num_units = part.num_visible;
    m.unit_pixels.assign(m.num_units, {});
    const auto cells = detail::cell_visible_units(g, part);
    for (std::size_t r = 0; r < g.grid_rows; ++r)
        for (std::size_t c = 0; c < g.grid_cols; ++c)
            for (std::size_t k = 0; k < 4; ++k) {
                const std::size_t row = 2 * r + k / 2;
                const std::size_t col = 2 * c + k % 2;
                m.unit_pixels[cells[r * g.grid_cols + c][k]] = {static_cast<std::uint32_t>(row * width + col)};
            }
    detail::invert_unit_pixels(m);
    return m;
}

inline PixelMapping extended_pixel_blocks_mapping(std::size_t width, std::size_t height,
                                                  const ChimeraGraph& g, const Bipartition& part) {
    detail::mapping_preconditions(width, height, g);
    PixelMapping m;
    m.kind = PixelMapping::Kind::extended_pixel_blocks;
    m.image_height = height;
    m.image_width = width;
    m.num_units = part.num_visible;
    m.unit_pixels.assign(m.num_units, {});
    const auto cells = detail::cell_visible_units(g, part);
    for (std::size_t r = 0; r < g.grid_rows; ++r) {
        for (std::size_t c = 0; c < g.grid_cols; ++c) {
            for (std::size_t k = 0; k < 4; ++k) {
                const std::size_t a = k / 2;
                const std::size_t b = k % 2;
                auto& pixels = m.unit_pixels[cells[r * g.grid_cols + c][k]];
                const long anchor_row = static_cast<long>(2 * r + 2 * a) - 1;
                const long anchor_col = static_cast<long>(2 * c + 2 * b) - 1;
                for (long dr = 0; dr < 2; ++dr)
                    for (long dc = 0; dc < 2; ++dc) {
                        const long row = anchor_row + dr;
                        const long col = anchor_col + dc;
                        if (row < 0 || col < 0 || row >= static_cast<long>(height) ||
                            col >= static_cast<long>(width))
                            continue;
                        pixels.push_back(static_cast<std::uint32_t>(row * width + col));
                    }
                require(!pixels.empty(), "extended mapping: unit with empty pixel patch");
            }
        }
    }
    detail::invert_unit_pixels(m);
    return m;
}

/// Unit intensity = mean of its pixels' intensities (identity for bijections).
inline Vector units_from_pixels(const PixelMapping& m, const Vector& pixels) {
    require(pixels.size() == m.num_pixels(), "units_from_pixels: pixel count mismatch");
    Vector units(m.num_units, 0.0);
    for (std::size_t u = 0; u < m.num_units; ++u) {
        double s = 0.0;
        for (std::uint32_t px : m.unit_pixels[u]) s += pixels[px];
        units[u] = s / static_cast<double>(m.unit_pixels[u].size());
    }
    return units;
}

/// Binary presentation in unit space: pixels are binarized once (units tied to
/// a single pixel share its bit); a unit spanning several pixels draws
/// Bernoulli on the mean of their bits.
inline BitVec binarize_mapped(const PixelMapping& m, const Vector& pixels, RngStream& rng) {
    require(pixels.size() == m.num_pixels(), "binarize_mapped: pixel count mismatch");
    BitVec pixel_bits(pixels.size());
    for (std::size_t px = 0; px < pixels.size(); ++px) {
        require(pixels[px] >= 0.0 && pixels[px] <= 1.0, "binarize_mapped: intensity outside [0,1]");
        pixel_bits[px] = rng.bernoulli(pixels[px]) ? 1 : 0;
    }
    BitVec units(m.num_units, 0);
    for (std::size_t u = 0; u < m.num_units; ++u) {
        const auto& pxs = m.unit_pixels[u];
        if (pxs.size() == 1) {
            units[u] = pixel_bits[pxs[0]];
        } else {
            double mean = 0.0;
            for (std::uint32_t px : pxs) mean += pixel_bits[px];
            mean /= static_cast<double>(pxs.size());
            units[u] = rng.bernoulli(mean) ? 1 : 0;
        }
    }
    return units;
}

/// Displayed pixel intensity = mean of the covering units' values.
inline Vector pixels_from_units(const PixelMapping& m, const Vector& units) {
    require(units.size() == m.num_units, "pixels_from_units: unit count mismatch");
    Vector pixels(m.num_pixels(), 0.0);
    for (std::size_t px = 0; px < pixels.size(); ++px) {
        const auto& us = m.pixel_units[px];
        require(!us.empty(), "pixels_from_units: uncovered pixel");
        double s = 0.0;
        for (std::uint32_t u : us) s += units[u];
        pixels[px] = s / static_cast<double>(us.size());
    }
    return pixels;
}

// Text format: one `unit_index pixel_row pixel_col` line per unit-pixel tie
// (a unit spanning several pixels emits several lines).
inline void save_mapping(const std::string& path, const PixelMapping& m) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_mapping: cannot open " + path);
    os << "# " << m.kind_name() << " " << m.image_width << "x" << m.image_height << " units=" << m.num_units
       << "\n";
    for (std::size_t u = 0; u < m.num_units; ++u)
        for (std::uint32_t px : m.unit_pixels[u])
            os << u << " " << px / m.image_width << " " << px % m.image_width << "\n";
    if (!os) throw std::runtime_error("save_mapping: write failed for " + path);
}

}  // namespace prbm
