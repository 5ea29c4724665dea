#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gdrop/matrix.hpp"

namespace gdrop {

namespace detail {

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] inline void parse_fail(const std::string& path, long line, const std::string& msg) {
    throw ParseError(path + ":" + std::to_string(line) + ": " + msg);
}

} // namespace detail

/// Matrix Market reader; coordinate files come back sparse, array files
/// dense. Supports real/integer fields with general or symmetric symmetry.
inline CoeffMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path + ": cannot open file");
    }
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) {
        detail::parse_fail(path, 1, "empty file");
    }
    ++lineno;
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (detail::lower(tag) != "%%matrixmarket" || detail::lower(object) != "matrix") {
        detail::parse_fail(path, lineno, "not a Matrix Market matrix file");
    }
    format = detail::lower(format);
    field = detail::lower(field);
    symmetry = detail::lower(symmetry);
    if (format != "coordinate" && format != "array") {
        detail::parse_fail(path, lineno, "unsupported format: " + format);
    }
    if (field != "real" && field != "integer") {
        detail::parse_fail(path, lineno, "unsupported field: " + field);
    }
    if (symmetry != "general" && symmetry != "symmetric") {
        detail::parse_fail(path, lineno, "unsupported symmetry: " + symmetry);
    }

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] != '%') {
            break;
        }
    }
    std::istringstream sizes(line);
    long rows = 0, cols = 0, nnz = 0;
    if (format == "coordinate") {
        if (!(sizes >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
            detail::parse_fail(path, lineno, "bad size line");
        }
        std::vector<Eigen::Triplet<double>> entries;
        entries.reserve(static_cast<std::size_t>(2 * nnz));
        for (long k = 0; k < nnz; ++k) {
            if (!std::getline(in, line)) {
                detail::parse_fail(path, lineno, "unexpected end of file");
            }
            ++lineno;
            std::istringstream row(line);
            long i = 0, j = 0;
            double v = 0.0;
            if (!(row >> i >> j >> v)) {
                detail::parse_fail(path, lineno, "bad coordinate entry");
            }
            if (i < 1 || i > rows || j < 1 || j > cols) {
                detail::parse_fail(path, lineno, "index out of range");
            }
            entries.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
            if (symmetry == "symmetric" && i != j) {
                entries.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
            }
        }
        SparseRealMatrix m(rows, cols);
        m.setFromTriplets(entries.begin(), entries.end());
        return CoeffMatrix(std::move(m));
    }
    if (!(sizes >> rows >> cols) || rows < 0 || cols < 0) {
        detail::parse_fail(path, lineno, "bad size line");
    }
    DenseMatrix m(rows, cols);
    for (long j = 0; j < cols; ++j) {
        const long i0 = symmetry == "symmetric" ? j : 0;
        for (long i = i0; i < rows; ++i) {
            if (!std::getline(in, line)) {
                detail::parse_fail(path, lineno, "unexpected end of file");
            }
            ++lineno;
            std::istringstream row(line);
            double v = 0.0;
            if (!(row >> v)) {
                detail::parse_fail(path, lineno, "bad array entry");
            }
            m(i, j) = v;
            if (symmetry == "symmetric") {
                m(j, i) = v;
            }
        }
    }
    return CoeffMatrix(std::move(m));
}

inline void write_matrix_market(const std::string& path, const SparseRealMatrix& m) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError(path + ": cannot open file for writing");
    }
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
    char buf[64];
    for (Index col = 0; col < m.outerSize(); ++col) {
        for (SparseRealMatrix::InnerIterator it(m, col); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%.17g", it.value());
            out << (it.row() + 1) << " " << (it.col() + 1) << " " << buf << "\n";
        }
    }
    if (!out) {
        throw ParseError(path + ": write failed");
    }
}

inline void write_matrix_market(const std::string& path, const DenseMatrix& m) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError(path + ": cannot open file for writing");
    }
    out << "%%MatrixMarket matrix array real general\n";
    out << m.rows() << " " << m.cols() << "\n";
    char buf[64];
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out << buf << "\n";
        }
    }
    if (!out) {
        throw ParseError(path + ": write failed");
    }
}

inline void write_matrix_market(const std::string& path, const CoeffMatrix& m) {
    if (m.is_sparse()) {
        write_matrix_market(path, m.sparse());
    } else {
        write_matrix_market(path, m.dense());
    }
}

} // namespace gdrop
