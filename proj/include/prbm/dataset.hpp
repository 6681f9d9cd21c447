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
#include <sstream>
#include <string>
#include <vector>

#include "prbm/matrix.hpp"
#include "prbm/rng.hpp"

namespace prbm {

/// Rows of real intensities in [0,1]; grayscale values are probabilities and
/// are binarized per presentation downstream, never thresholded at load time.
struct Dataset {
    Matrix rows;  // num_examples x dim
    std::string name;
    std::string split = "train";
    std::vector<std::uint8_t> labels;  // optional pass-through

    std::size_t num_examples() const { return rows.rows; }
    std::size_t dim() const { return rows.cols; }

    Vector row(std::size_t t) const {
        return Vector(rows.data.begin() + static_cast<std::ptrdiff_t>(t * rows.cols),
                      rows.data.begin() + static_cast<std::ptrdiff_t>((t + 1) * rows.cols));
    }
};

namespace detail {

inline std::uint32_t read_u32_be(std::istream& is, std::size_t offset, const std::string& what) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is)
        throw std::runtime_error("IDX parse error at byte " + std::to_string(offset) + ": truncated " + what);
    return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
           (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
}

}  // namespace detail

/// IDX image file: big-endian magic 0x00000803, then count/rows/cols u32 and
/// unsigned bytes. Intensities are scaled by 1/255 into [0,1]. An optional
/// label file (magic 0x00000801) is carried through untouched.
inline Dataset load_idx(const std::string& images_path, const std::string& labels_path = "") {
    std::ifstream is(images_path, std::ios::binary);
    if (!is) throw std::runtime_error("load_idx: cannot open " + images_path);
    const std::uint32_t magic = detail::read_u32_be(is, 0, "magic");
    if (magic != 0x00000803u) {
        std::ostringstream msg;
        msg << "load_idx: bad magic at byte 0 in " << images_path << ": expected 0x00000803, got 0x" << std::hex
            << magic;
        throw std::runtime_error(msg.str());
    }
    const std::uint32_t count = detail::read_u32_be(is, 4, "image count");
    const std::uint32_t height = detail::read_u32_be(is, 8, "row count");
    const std::uint32_t width = detail::read_u32_be(is, 12, "column count");
    const std::size_t dim = static_cast<std::size_t>(height) * width;
    Dataset ds;
    ds.name = images_path;
    ds.rows = Matrix(count, dim);
    std::vector<unsigned char> buf(dim);
    for (std::uint32_t t = 0; t < count; ++t) {
        is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(dim));
        if (!is)
            throw std::runtime_error("load_idx: truncated pixel data at byte " +
                                     std::to_string(16 + static_cast<std::size_t>(t) * dim) + " in " +
                                     images_path);
        for (std::size_t i = 0; i < dim; ++i) ds.rows(t, i) = static_cast<double>(buf[i]) / 255.0;
    }
    if (!labels_path.empty()) {
        std::ifstream ls(labels_path, std::ios::binary);
        if (!ls) throw std::runtime_error("load_idx: cannot open labels " + labels_path);
        const std::uint32_t lmagic = detail::read_u32_be(ls, 0, "label magic");
        if (lmagic != 0x00000801u)
            throw std::runtime_error("load_idx: bad label magic in " + labels_path);
        const std::uint32_t lcount = detail::read_u32_be(ls, 4, "label count");
        if (lcount != count)
            throw std::runtime_error("load_idx: label count " + std::to_string(lcount) +
                                     " does not match image count " + std::to_string(count));
        ds.labels.resize(lcount);
        ls.read(reinterpret_cast<char*>(ds.labels.data()), static_cast<std::streamsize>(lcount));
        if (!ls) throw std::runtime_error("load_idx: truncated label data in " + labels_path);
    }
    return ds;
}

/// Rectangular comma- or whitespace-separated matrix with entries in [0,1].
inline Dataset load_binary_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_binary_csv: cannot open " + path);
    std::vector<Vector> parsed;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        for (char& ch : line)
            if (ch == ',' || ch == '\t' || ch == '\r') ch = ' ';
        std::istringstream ss(line);
        Vector row;
        std::string tok;
        while (ss >> tok) {
            double x;
            try {
                std::size_t used = 0;
                x = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw std::runtime_error("load_binary_csv: unparseable entry '" + tok + "' at line " +
                                         std::to_string(lineno) + " of " + path);
            }
            if (x < 0.0 || x > 1.0)
                throw std::runtime_error("load_binary_csv: entry " + tok + " outside [0,1] at line " +
                                         std::to_string(lineno) + " of " + path);
            row.push_back(x);
        }
        if (row.empty()) continue;
        if (!parsed.empty() && row.size() != parsed.front().size())
            throw std::runtime_error("load_binary_csv: ragged row at line " + std::to_string(lineno) + " of " +
                                     path + " (expected " + std::to_string(parsed.front().size()) +
                                     " entries, got " + std::to_string(row.size()) + ")");
        parsed.push_back(std::move(row));
    }
    Dataset ds;
    ds.name = path;
    const std::size_t dim = parsed.empty() ? 0 : parsed.front().size();
    ds.rows = Matrix(parsed.size(), dim);
    for (std::size_t t = 0; t < parsed.size(); ++t)
        for (std::size_t i = 0; i < dim; ++i) ds.rows(t, i) = parsed[t][i];
    return ds;
}

inline void save_binary_csv(const std::string& path, const Dataset& ds) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_binary_csv: cannot open " + path);
    for (std::size_t t = 0; t < ds.num_examples(); ++t) {
        for (std::size_t i = 0; i < ds.dim(); ++i) {
            if (i) os << ',';
            os << ds.rows(t, i);
        }
        os << '\n';
    }
    if (!os) throw std::runtime_error("save_binary_csv: write failed for " + path);
}

/// Per-example binarization for evaluation or fixtures: one Bernoulli draw per
/// entry.
inline std::vector<BitVec> binarize_dataset(const Dataset& ds, RngStream& rng) {
    std::vector<BitVec> out(ds.num_examples());
    for (std::size_t t = 0; t < ds.num_examples(); ++t) {
        out[t].resize(ds.dim());
        for (std::size_t i = 0; i < ds.dim(); ++i) {
            const double p = ds.rows(t, i);
            require(p >= 0.0 && p <= 1.0, "binarize_dataset: intensity outside [0,1]");
            out[t][i] = rng.bernoulli(p) ? 1 : 0;
        }
    }
    return out;
}

}  // namespace prbm
