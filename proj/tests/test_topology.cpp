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

#include <array>
#include <cstdio>
#include <set>

#include "prbm/chimera.hpp"
#include "prbm/pixel_map.hpp"

using namespace prbm;

namespace {

std::size_t edge_count_formula(std::size_t m, std::size_t n, std::size_t l) {
    return m * n * l * l + l * (m * (n - 1) + n * (m - 1));
}

}  // namespace

TEST_CASE("chimera node and edge counts", "[topology]") {
    const ChimeraGraph c114 = build_chimera(1, 1, 4);
    REQUIRE(c114.num_nodes() == 8);
    REQUIRE(c114.edges.size() == 16);

    const ChimeraGraph c884 = build_chimera(8, 8, 4);
    REQUIRE(c884.num_nodes() == 512);
    REQUIRE(c884.edges.size() == 1472);

    const ChimeraGraph c211 = build_chimera(2, 1, 1);
    REQUIRE(c211.num_nodes() == 4);
    REQUIRE(c211.edges.size() == 3);
}

TEST_CASE("edge count matches the closed form for all small grids", "[topology]") {
    for (std::size_t m = 1; m <= 16; ++m)
        for (std::size_t n = 1; n <= 16; ++n)
            for (std::size_t l = 1; l <= 8; ++l) {
                const ChimeraGraph g = build_chimera(m, n, l);
                REQUIRE(g.edges.size() == edge_count_formula(m, n, l));
                REQUIRE(g.num_nodes() == 2 * m * n * l);
            }
}

TEST_CASE("bipartition is proper and balanced", "[topology]") {
    const ChimeraGraph g = build_chimera(8, 8, 4);
    const Bipartition part = bipartition(g);
    REQUIRE(part.num_visible == 256);
    REQUIRE(part.num_hidden == 256);
    for (const auto& [u, v] : g.edges) REQUIRE(part.side[u] != part.side[v]);

    // every edge of C(14,14,4) crosses the partition
    const ChimeraGraph big = build_chimera(14, 14, 4);
    const Bipartition big_part = bipartition(big);
    for (const auto& [u, v] : big.edges) REQUIRE(big_part.side[u] != big_part.side[v]);
}

TEST_CASE("single cell: left shore visible, right shore hidden", "[topology]") {
    const ChimeraGraph g = build_chimera(1, 1, 4);
    const Bipartition part = bipartition(g);
    REQUIRE(part.num_visible == 4);
    REQUIRE(part.num_hidden == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        REQUIRE(part.side[g.node(0, 0, 0, k)] == 0);
        REQUIRE(part.side[g.node(0, 0, 1, k)] == 1);
    }
}

TEST_CASE("shore roles alternate in a checkerboard", "[topology]") {
    const ChimeraGraph g = build_chimera(5, 7, 3);
    const Bipartition part = bipartition(g);
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 7; ++c) {
            const std::uint8_t left_side = part.side[g.node(r, c, 0, 0)];
            for (std::size_t k = 0; k < 3; ++k) {
                REQUIRE(part.side[g.node(r, c, 0, k)] == left_side);
                REQUIRE(part.side[g.node(r, c, 1, k)] == 1 - left_side);
            }
            REQUIRE(left_side == ((r + c) % 2));
        }
}

TEST_CASE("odd cycles are rejected", "[topology]") {
    ChimeraGraph g = build_chimera(1, 1, 2);
    g.edges.emplace_back(g.node(0, 0, 0, 0), g.node(0, 0, 0, 1));  // edge within a shore
    REQUIRE_THROWS_AS(bipartition(g), std::logic_error);
}

TEST_CASE("internal cells have degree L+2", "[topology]") {
    const ChimeraGraph g = build_chimera(8, 8, 4);
    std::vector<std::size_t> degree(g.num_nodes(), 0);
    for (const auto& [u, v] : g.edges) {
        ++degree[u];
        ++degree[v];
    }
    std::size_t max_degree = 0;
    for (std::size_t d : degree) max_degree = std::max(max_degree, d);
    REQUIRE(max_degree == 6);
    for (std::size_t r = 1; r < 7; ++r)
        for (std::size_t c = 1; c < 7; ++c)
            for (int side = 0; side < 2; ++side)
                for (std::size_t k = 0; k < 4; ++k) REQUIRE(degree[g.node(r, c, side, k)] == 6);
}

TEST_CASE("chimera mask counts", "[topology]") {
    const ChimeraGraph small = build_chimera(1, 1, 4);
    const ConnectivityMask small_mask = chimera_mask(small, bipartition(small));
    REQUIRE(small_mask.num_visible == 4);
    REQUIRE(small_mask.num_hidden == 4);
    REQUIRE(small_mask.allowed_count() == 16);  // dense K_{4,4}

    const ChimeraGraph big = build_chimera(14, 14, 4);
    const ConnectivityMask mask = chimera_mask(big, bipartition(big));
    REQUIRE(mask.num_visible == 784);
    REQUIRE(mask.num_hidden == 784);
    REQUIRE(mask.allowed.size() == 614656);
    REQUIRE(mask.allowed_count() == 4592);
    REQUIRE(1.0 - mask.density() > 0.9925);
}

TEST_CASE("mask density equals edges over D*N", "[topology]") {
    const std::vector<std::array<std::size_t, 3>> dims = {{3, 4, 2}, {5, 2, 3}, {2, 2, 4}};
    for (const auto& [m, n, l] : dims) {
        const ChimeraGraph g = build_chimera(m, n, l);
        const Bipartition part = bipartition(g);
        const ConnectivityMask mask = chimera_mask(g, part);
        REQUIRE(mask.allowed_count() == g.edges.size());
        REQUIRE(mask.density() ==
                Approx(static_cast<double>(g.edges.size()) / (part.num_visible * part.num_hidden)));
    }
}

TEST_CASE("chimera mask transposes when the sides flip", "[topology]") {
    const ChimeraGraph g = build_chimera(3, 3, 2);
    const Bipartition part = bipartition(g);
    const ConnectivityMask mask = chimera_mask(g, part);
    const ConnectivityMask flipped = chimera_mask(g, flip_sides(part));
    REQUIRE(flipped.num_visible == mask.num_hidden);
    REQUIRE(flipped.num_hidden == mask.num_visible);
    for (std::size_t j = 0; j < mask.num_hidden; ++j)
        for (std::size_t i = 0; i < mask.num_visible; ++i) REQUIRE(mask.at(j, i) == flipped.at(i, j));
}

TEST_CASE("pixel_blocks is a bijection on 28x28", "[topology]") {
    const ChimeraGraph g = build_chimera(14, 14, 4);
    const Bipartition part = bipartition(g);
    const PixelMapping m = pixel_blocks_mapping(28, 28, g, part);
    REQUIRE(m.num_units == 784);
    std::set<std::uint32_t> used;
    for (const auto& pxs : m.unit_pixels) {
        REQUIRE(pxs.size() == 1);
        used.insert(pxs[0]);
    }
    REQUIRE(used.size() == 784);
    for (const auto& us : m.pixel_units) REQUIRE(us.size() == 1);
    // corner pixel belongs to the first visible unit of cell (0,0)
    REQUIRE(m.unit_pixels[0] == std::vector<std::uint32_t>{0});
}

TEST_CASE("pixel_blocks on a 4x4 image matches the hand enumeration", "[topology]") {
    const ChimeraGraph g = build_chimera(2, 2, 4);
    const Bipartition part = bipartition(g);
    const PixelMapping m = pixel_blocks_mapping(4, 4, g, part);
    // cells own their 2x2 blocks in row-major unit order; unit numbering
    // follows node order across the checkerboard of visible shores
    const std::vector<std::pair<std::size_t, std::size_t>> expected = {
        {0, 0}, {0, 1}, {1, 0}, {1, 1},  // cell (0,0), left shore
        {0, 2}, {0, 3}, {1, 2}, {1, 3},  // cell (0,1), right shore
        {2, 0}, {2, 1}, {3, 0}, {3, 1},  // cell (1,0), right shore
        {2, 2}, {2, 3}, {3, 2}, {3, 3},  // cell (1,1), left shore
    };
    REQUIRE(m.num_units == 16);
    for (std::size_t u = 0; u < 16; ++u) {
        REQUIRE(m.unit_pixels[u].size() == 1);
        REQUIRE(m.unit_pixels[u][0] == expected[u].first * 4 + expected[u].second);
    }
}

TEST_CASE("extended mapping coverage and overlap", "[topology]") {
    const ChimeraGraph g = build_chimera(14, 14, 4);
    const Bipartition part = bipartition(g);
    const PixelMapping m = extended_pixel_blocks_mapping(28, 28, g, part);
    REQUIRE(m.num_units == 784);
    // corner pixel (0,0) backs exactly one unit
    REQUIRE(m.pixel_units[0].size() == 1);
    // every pixel backs at least one unit; interior pixels back four units
    // from distinct neighboring cells
    for (std::size_t px = 0; px < m.num_pixels(); ++px) REQUIRE(!m.pixel_units[px].empty());
    std::size_t max_backing = 0;
    for (std::size_t row = 1; row < 27; ++row)
        for (std::size_t col = 1; col < 27; ++col) {
            const auto& us = m.pixel_units[row * 28 + col];
            REQUIRE(us.size() == 4);
            max_backing = std::max(max_backing, us.size());
        }
    REQUIRE(max_backing == 4);
    // every visible unit covers between one and four pixels
    for (const auto& pxs : m.unit_pixels) {
        REQUIRE(pxs.size() >= 1);
        REQUIRE(pxs.size() <= 4);
    }
}

TEST_CASE("mapping preconditions", "[topology]") {
    const ChimeraGraph g = build_chimera(2, 2, 4);
    const Bipartition part = bipartition(g);
    REQUIRE_THROWS_AS(pixel_blocks_mapping(6, 4, g, part), std::invalid_argument);
    const ChimeraGraph wrong_shore = build_chimera(2, 2, 2);
    REQUIRE_THROWS_AS(pixel_blocks_mapping(4, 4, wrong_shore, bipartition(wrong_shore)),
                      std::invalid_argument);
}

TEST_CASE("unit/pixel transforms invert for bijective mappings", "[topology]") {
    const ChimeraGraph g = build_chimera(2, 2, 4);
    const Bipartition part = bipartition(g);
    const PixelMapping m = pixel_blocks_mapping(4, 4, g, part);
    Vector pixels(16);
    for (std::size_t i = 0; i < 16; ++i) pixels[i] = static_cast<double>(i) / 16.0;
    const Vector units = units_from_pixels(m, pixels);
    const Vector back = pixels_from_units(m, units);
    REQUIRE(back == pixels);
}

TEST_CASE("mapping file lists one line per unit-pixel tie", "[topology]") {
    const ChimeraGraph g = build_chimera(2, 2, 4);
    const Bipartition part = bipartition(g);
    const PixelMapping m = pixel_blocks_mapping(4, 4, g, part);
    const std::string path = "test_mapping.txt";
    save_mapping(path, m);
    std::ifstream is(path);
    std::string line;
    std::size_t lines = 0, comments = 0;
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] == '#')
            ++comments;
        else if (!line.empty())
            ++lines;
    }
    REQUIRE(lines == 16);
    REQUIRE(comments == 1);
    std::remove(path.c_str());
}
