#pragma once

// File formats for the experiment CLI: matrix CSV (one row per line, '#'
// comment lines allowed), permutation CSV (source,dest pairs, 0-based),
// binary 8-bit PGM images, and fixed 17-significant-digit float formatting
// so identical runs produce identical bytes.

#include "uls/core.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace uls {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// Matrix CSV
// ---------------------------------------------------------------------------

inline Mat read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open matrix file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos])))
                    ++pos;
                if (pos != cell.size())
                    throw DataError("trailing characters in cell");
                row.push_back(v);
            } catch (const std::exception&) {
                throw DataError(path + ":" + std::to_string(lineno) +
                                ": cannot parse numeric cell '" + cell + "'");
            }
        }
        if (row.empty())
            throw DataError(path + ":" + std::to_string(lineno) + ": empty row");
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError(path + ":" + std::to_string(lineno) + ": ragged row, expected " +
                            std::to_string(rows.front().size()) + " columns");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path + ": no data rows");
    Mat M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    if (!all_finite(M)) throw DataError(path + ": non-finite entry in matrix");
    return M;
}

inline void write_matrix_csv(const std::string& path, const Mat& M,
                             const std::vector<std::string>& comments = {}) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    for (const auto& c : comments) out << "# " << c << "\n";
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j > 0) out << ",";
            out << format_double(M(i, j));
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Permutation CSV: one "source,dest" pair per line, 0-based row indices.
// ---------------------------------------------------------------------------

inline void write_permutation_csv(const std::string& path, const BlockPermutation& p,
                                  const std::vector<std::string>& comments = {}) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    for (const auto& c : comments) out << "# " << c << "\n";
    out << "source_row,dest_row\n";
    const auto map = p.global_map();
    for (std::size_t i = 0; i < map.size(); ++i)
        out << i << "," << map[i] << "\n";
}

/// Reads (source,dest) pairs; validates a complete bijection on {0..n-1}.
inline std::vector<int> read_permutation_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open permutation file: " + path);
    std::vector<std::pair<int, int>> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("source_row", 0) == 0) continue;  // header row
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw DataError(path + ":" + std::to_string(lineno) + ": expected 'source,dest'");
        try {
            pairs.emplace_back(std::stoi(a), std::stoi(b));
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(lineno) + ": cannot parse indices");
        }
    }
    const int n = static_cast<int>(pairs.size());
    if (n == 0) throw DataError(path + ": no permutation entries");
    std::vector<int> map(static_cast<std::size_t>(n), -1);
    std::vector<bool> dest_seen(static_cast<std::size_t>(n), false);
    for (const auto& [src, dst] : pairs) {
        if (src < 0 || src >= n || dst < 0 || dst >= n)
            throw DataError(path + ": permutation index out of range");
        if (map[static_cast<std::size_t>(src)] != -1)
            throw DataError(path + ": duplicate source row " + std::to_string(src));
        if (dest_seen[static_cast<std::size_t>(dst)])
            throw DataError(path + ": duplicate destination row " + std::to_string(dst));
        map[static_cast<std::size_t>(src)] = dst;
        dest_seen[static_cast<std::size_t>(dst)] = true;
    }
    return map;
}

// ---------------------------------------------------------------------------
// PGM (P5, 8-bit)
// ---------------------------------------------------------------------------

/// Reads a binary PGM into a matrix of raw intensities in [0, 255].
inline Mat read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open image: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw DataError(path + ": expected binary PGM (P5)");
    auto next_token = [&]() -> long {
        for (;;) {
            int c = in.peek();
            if (c == '#') {
                std::string comment;
                std::getline(in, comment);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        long v = -1;
        in >> v;
        if (!in) throw DataError(path + ": malformed PGM header");
        return v;
    };
    const long w = next_token();
    const long h = next_token();
    const long maxval = next_token();
    if (w <= 0 || h <= 0) throw DataError(path + ": bad image dimensions");
    if (maxval <= 0 || maxval > 255) throw DataError(path + ": only 8-bit PGM supported");
    in.get();  // single whitespace after header
    std::vector<unsigned char> buf(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
        throw DataError(path + ": truncated pixel data");
    Mat M(h, w);
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j)
            M(i, j) = static_cast<double>(buf[static_cast<std::size_t>(i * w + j)]);
    return M;
}

/// Writes intensities (clamped and rounded to [0, 255]) as binary PGM.
inline void write_pgm(const std::string& path, const Mat& M) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "P5\n" << M.cols() << " " << M.rows() << "\n255\n";
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            const double v = std::min(255.0, std::max(0.0, std::round(M(i, j))));
            out.put(static_cast<char>(static_cast<unsigned char>(v)));
        }
}

}  // namespace uls
