#pragma once

#include <complex>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "gdrop/errors.hpp"

namespace gdrop {

using Index = Eigen::Index;
using Complex = std::complex<double>;

using DenseMatrix = Eigen::MatrixXd;
using DenseComplexMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using SparseRealMatrix = Eigen::SparseMatrix<double>;
using SparseComplexMatrix = Eigen::SparseMatrix<Complex>;

/// System coefficient A_i with either sparse or dense storage.
///
/// Kernels dispatch on the storage kind; there is no implicit densification.
class CoeffMatrix {
public:
    CoeffMatrix(SparseRealMatrix m) : storage_(std::move(m)) {
        std::get<SparseRealMatrix>(storage_).makeCompressed();
    }
    CoeffMatrix(DenseMatrix m) : storage_(std::move(m)) {}

    static CoeffMatrix identity(Index n) {
        SparseRealMatrix eye(n, n);
        eye.setIdentity();
        return CoeffMatrix(std::move(eye));
    }

    Index rows() const {
        return std::visit([](const auto& m) { return m.rows(); }, storage_);
    }
    Index cols() const {
        return std::visit([](const auto& m) { return m.cols(); }, storage_);
    }

    bool is_sparse() const { return std::holds_alternative<SparseRealMatrix>(storage_); }

    const SparseRealMatrix& sparse() const {
        if (!is_sparse()) {
            throw DimensionMismatchError("coefficient matrix is stored dense");
        }
        return std::get<SparseRealMatrix>(storage_);
    }

    const DenseMatrix& dense() const {
        if (is_sparse()) {
            throw DimensionMismatchError("coefficient matrix is stored sparse");
        }
        return std::get<DenseMatrix>(storage_);
    }

    DenseMatrix to_dense() const {
        return is_sparse() ? DenseMatrix(sparse()) : dense();
    }

    /// A * x or A^T * x without densifying A.
    template <typename Derived>
    auto apply(const Eigen::MatrixBase<Derived>& x, bool transposed = false) const {
        using Result = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
        if (x.rows() != (transposed ? rows() : cols())) {
            throw DimensionMismatchError("matrix-product operand has wrong row count");
        }
        if (is_sparse()) {
            const auto& a = sparse();
            return transposed ? Result(a.transpose() * x) : Result(a * x);
        }
        const auto& a = dense();
        return transposed ? Result(a.transpose() * x) : Result(a * x);
    }

    double frobenius_norm() const {
        return std::visit([](const auto& m) { return m.norm(); }, storage_);
    }

private:
    std::variant<SparseRealMatrix, DenseMatrix> storage_;
};

/// Assembled K(s); sparse when every term is sparse, dense otherwise.
using KMatrix = std::variant<SparseComplexMatrix, DenseComplexMatrix>;

} // namespace gdrop
