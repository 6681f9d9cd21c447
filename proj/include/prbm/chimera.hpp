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
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "prbm/constraints.hpp"
#include "prbm/matrix.hpp"

namespace prbm {

/// Chimera graph C(M,N,L): an M x N grid of K_{L,L} unit cells. Within a cell
/// the left shore couples to the right shore; left shores couple to the left
/// shores of vertically adjacent cells, right shores to the right shores of
/// horizontally adjacent cells. Node index = ((row*N + col)*2 + shore)*L + k
/// with shore 0 = left, 1 = right.
struct ChimeraGraph {
    std::size_t grid_rows = 0;  // M
    std::size_t grid_cols = 0;  // N
    std::size_t shore = 0;      // L
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

    std::size_t num_nodes() const { return 2 * grid_rows * grid_cols * shore; }

    std::uint32_t node(std::size_t row, std::size_t col, int side, std::size_t k) const {
        return static_cast<std::uint32_t>(((row * grid_cols + col) * 2 + static_cast<std::size_t>(side)) * shore + k);
    }

    std::string name() const {
        return "chimera(" + std::to_string(grid_rows) + "," + std::to_string(grid_cols) + "," +
               std::to_string(shore) + ")";
    }
};

inline ChimeraGraph build_chimera(std::size_t m, std::size_t n, std::size_t l) {
    require(m >= 1 && n >= 1 && l >= 1, "build_chimera: dimensions must be >= 1");
    ChimeraGraph g;
    g.grid_rows = m;
    g.grid_cols = n;
    g.shore = l;
    g.edges.reserve(m * n * l * l + l * (m * (n - 1) + n * (m - 1)));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t a = 0; a < l; ++a)
                for (std::size_t b = 0; b < l; ++b)
                    g.edges.emplace_back(g.node(r, c, 0, a), g.node(r, c, 1, b));
            if (r + 1 < m)
                for (std::size_t k = 0; k < l; ++k)
                    g.edges.emplace_back(g.node(r, c, 0, k), g.node(r + 1, c, 0, k));
            if (c + 1 < n)
                for (std::size_t k = 0; k < l; ++k)
                    g.edges.emplace_back(g.node(r, c, 1, k), g.node(r, c + 1, 1, k));
        }
    }
    return g;
}

/// 2-coloring of a chimera graph. Side 0 is the visible side, side 1 hidden.
/// unit_index[node] numbers the nodes within their side, in node order.
struct Bipartition {
    std::vector<std::uint8_t> side;
    std::vector<std::uint32_t> unit_index;
    std::size_t num_visible = 0;
    std::size_t num_hidden = 0;
};

/// Breadth-first 2-coloring, seeded with side 0 at the lowest-index node of
/// each component. Throws on an odd cycle, which a well-formed chimera graph
/// cannot contain.
inline Bipartition bipartition(const ChimeraGraph& g) {
    const std::size_t n = g.num_nodes();
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const auto& [u, v] : g.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    Bipartition part;
    part.side.assign(n, 0xff);
    for (std::size_t start = 0; start < n; ++start) {
        if (part.side[start] != 0xff) continue;
        part.side[start] = 0;
        std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(start)};
        while (!queue.empty()) {
            const std::uint32_t u = queue.front();
            queue.pop_front();
            for (std::uint32_t v : adj[u]) {
                if (part.side[v] == 0xff) {
                    part.side[v] = static_cast<std::uint8_t>(1 - part.side[u]);
                    queue.push_back(v);
                } else if (part.side[v] == part.side[u]) {
                    throw std::logic_error("bipartition: odd cycle through nodes " + std::to_string(u) +
                                           " and " + std::to_string(v));
                }
            }
        }
    }
    part.unit_index.assign(n, 0);
    for (std::size_t u = 0; u < n; ++u) {
        if (part.side[u] == 0)
            part.unit_index[u] = static_cast<std::uint32_t>(part.num_visible++);
        else
            part.unit_index[u] = static_cast<std::uint32_t>(part.num_hidden++);
    }
    return part;
}

inline Bipartition flip_sides(Bipartition part) {
    std::swap(part.num_visible, part.num_hidden);
    std::size_t nv = 0, nh = 0;
    for (std::size_t u = 0; u < part.side.size(); ++u) {
        part.side[u] ^= 1;
        part.unit_index[u] = static_cast<std::uint32_t>(part.side[u] == 0 ? nv++ : nh++);
    }
    return part;
}

/// num_hidden x num_visible mask with an allowed entry wherever the graph has
/// an edge between the corresponding units.
inline ConnectivityMask chimera_mask(const ChimeraGraph& g, const Bipartition& part) {
    ConnectivityMask mask;
    mask.num_visible = part.num_visible;
    mask.num_hidden = part.num_hidden;
    mask.allowed.assign(part.num_visible * part.num_hidden, 0);
    for (const auto& [u, v] : g.edges) {
        const std::uint32_t vis = part.side[u] == 0 ? u : v;
        const std::uint32_t hid = part.side[u] == 0 ? v : u;
        require(part.side[vis] == 0 && part.side[hid] == 1, "chimera_mask: edge does not cross the partition");
        mask.allowed[part.unit_index[hid] * mask.num_visible + part.unit_index[vis]] = 1;
    }
    mask.provenance = g.name();
    return mask;
}

}  // namespace prbm
