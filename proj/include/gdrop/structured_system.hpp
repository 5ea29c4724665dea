#pragma once

#include <utility>
#include <vector>

#include "gdrop/linalg.hpp"
#include "gdrop/matrix.hpp"
#include "gdrop/scalar_function.hpp"

namespace gdrop {

/// One affine term f_i(s) * A_i.
struct Term {
    CoeffMatrix matrix;
    ScalarFunction function;
};

/// System with transfer function H(s) = C * K(s)^-1 * B,
/// K(s) = sum_i f_i(s) * A_i.
class StructuredSystem {
public:
    StructuredSystem(std::vector<Term> terms, DenseMatrix b, DenseMatrix c)
        : terms_(std::move(terms)), b_(std::move(b)), c_(std::move(c)) {
        if (terms_.empty()) {
            throw DimensionMismatchError("system needs at least one term");
        }
        const Index n = terms_.front().matrix.rows();
        for (const Term& t : terms_) {
            if (t.matrix.rows() != n || t.matrix.cols() != n) {
                throw DimensionMismatchError("all coefficient matrices must be n x n");
            }
        }
        if (b_.rows() != n || b_.cols() < 1) {
            throw DimensionMismatchError("input matrix must be n x m with m >= 1");
        }
        if (c_.cols() != n || c_.rows() < 1) {
            throw DimensionMismatchError("output matrix must be p x n with p >= 1");
        }
    }

    Index order() const { return terms_.front().matrix.rows(); }
    Index num_terms() const { return static_cast<Index>(terms_.size()); }
    Index num_inputs() const { return b_.cols(); }
    Index num_outputs() const { return c_.rows(); }

    const Term& term(Index i) const { return terms_.at(static_cast<std::size_t>(i)); }
    const std::vector<Term>& terms() const { return terms_; }
    const DenseMatrix& input_matrix() const { return b_; }
    const DenseMatrix& output_matrix() const { return c_; }

    bool all_sparse() const {
        for (const Term& t : terms_) {
            if (!t.matrix.is_sparse()) {
                return false;
            }
        }
        return true;
    }

private:
    std::vector<Term> terms_;
    DenseMatrix b_;
    DenseMatrix c_;
};

/// Assemble K(s) (or K(s)^T); sparse iff every coefficient is sparse.
inline KMatrix eval_K(const StructuredSystem& sys, Complex s, bool transposed = false) {
    const Index n = sys.order();
    if (sys.all_sparse()) {
        std::vector<Eigen::Triplet<Complex>> entries;
        std::size_t nnz = 0;
        for (const Term& t : sys.terms()) {
            nnz += static_cast<std::size_t>(t.matrix.sparse().nonZeros());
        }
        entries.reserve(nnz);
        for (const Term& t : sys.terms()) {
            const Complex f = t.function(s);
            const SparseRealMatrix& a = t.matrix.sparse();
            for (Index col = 0; col < a.outerSize(); ++col) {
                for (SparseRealMatrix::InnerIterator it(a, col); it; ++it) {
                    const Index r = transposed ? it.col() : it.row();
                    const Index c = transposed ? it.row() : it.col();
                    entries.emplace_back(static_cast<int>(r), static_cast<int>(c), f * it.value());
                }
            }
        }
        SparseComplexMatrix k(n, n);
        k.setFromTriplets(entries.begin(), entries.end());
        return k;
    }
    DenseComplexMatrix k = DenseComplexMatrix::Zero(n, n);
    for (const Term& t : sys.terms()) {
        const Complex f = t.function(s);
        const DenseMatrix a = t.matrix.to_dense();
        if (transposed) {
            k += f * a.transpose();
        } else {
            k += f * a;
        }
    }
    return k;
}

/// Factorize K(s) (or K(s)^T) at one point.
inline SolveHandle factorize_K(const StructuredSystem& sys, Complex s, bool transposed = false) {
    return SolveHandle(eval_K(sys, s, transposed), s);
}

/// H(s) = C K(s)^-1 B.
inline DenseComplexMatrix eval_transfer(const StructuredSystem& sys, Complex s) {
    const SolveHandle k = factorize_K(sys, s);
    const DenseComplexMatrix x = k.solve(sys.input_matrix().cast<Complex>());
    return sys.output_matrix().cast<Complex>() * x;
}

} // namespace gdrop
