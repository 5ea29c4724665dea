#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <lapacke.h>

#include "gdrop/errors.hpp"
#include "gdrop/matrix.hpp"

namespace gdrop {

struct SvdResult {
    DenseMatrix u;  // m x k
    Vector s;       // k, descending
    DenseMatrix vt; // k x n
};

/// Thin SVD of a dense real matrix (divide-and-conquer LAPACK backend).
inline SvdResult svd(const DenseMatrix& m) {
    const Index rows = m.rows();
    const Index cols = m.cols();
    const Index k = std::min(rows, cols);
    SvdResult out;
    out.u.resize(rows, k);
    out.s.resize(k);
    out.vt.resize(k, cols);
    if (k == 0) {
        return out;
    }
    DenseMatrix a = m;
    const lapack_int info = LAPACKE_dgesdd(
        LAPACK_COL_MAJOR, 'S', static_cast<lapack_int>(rows), static_cast<lapack_int>(cols),
        a.data(), static_cast<lapack_int>(rows), out.s.data(), out.u.data(),
        static_cast<lapack_int>(rows), out.vt.data(), static_cast<lapack_int>(k));
    if (info < 0) {
        throw Error("invalid argument passed to SVD backend");
    }
    if (info > 0) {
        throw ConvergenceError("SVD backend did not converge");
    }
    return out;
}

inline bool lu_is_singular(const Eigen::PartialPivLU<DenseComplexMatrix>& lu) {
    const auto diag = lu.matrixLU().diagonal();
    if (diag.size() == 0) {
        return false;
    }
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (Index i = 0; i < diag.size(); ++i) {
        const double a = std::abs(diag(i));
        dmin = std::min(dmin, a);
        dmax = std::max(dmax, a);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    return !(dmin > static_cast<double>(diag.size()) * eps * dmax);
}

/// Factorized K(s), reusable for several right-hand sides.
class SolveHandle {
public:
    explicit SolveHandle(const SparseComplexMatrix& k, Complex point = Complex(0.0, 0.0))
        : n_(k.rows()) {
        if (k.rows() != k.cols()) {
            throw DimensionMismatchError("cannot factorize a non-square matrix");
        }
        auto lu = std::make_shared<Eigen::SparseLU<SparseComplexMatrix>>();
        lu->compute(k);
        if (lu->info() != Eigen::Success) {
            throw SingularKError(point);
        }
        sparse_lu_ = std::move(lu);
    }

    explicit SolveHandle(const DenseComplexMatrix& k, Complex point = Complex(0.0, 0.0))
        : n_(k.rows()) {
        if (k.rows() != k.cols()) {
            throw DimensionMismatchError("cannot factorize a non-square matrix");
        }
        auto lu = std::make_shared<Eigen::PartialPivLU<DenseComplexMatrix>>(k);
        if (lu_is_singular(*lu)) {
            throw SingularKError(point);
        }
        dense_lu_ = std::move(lu);
    }

    explicit SolveHandle(const KMatrix& k, Complex point = Complex(0.0, 0.0))
        : SolveHandle(std::holds_alternative<SparseComplexMatrix>(k)
                          ? SolveHandle(std::get<SparseComplexMatrix>(k), point)
                          : SolveHandle(std::get<DenseComplexMatrix>(k), point)) {}

    DenseComplexMatrix solve(const DenseComplexMatrix& rhs) const {
        if (rhs.rows() != n_) {
            throw DimensionMismatchError("right-hand side has wrong row count");
        }
        return sparse_lu_ ? DenseComplexMatrix(sparse_lu_->solve(rhs)) : dense_lu_->solve(rhs);
    }

    Index size() const { return n_; }

private:
    std::shared_ptr<const Eigen::SparseLU<SparseComplexMatrix>> sparse_lu_;
    std::shared_ptr<const Eigen::PartialPivLU<DenseComplexMatrix>> dense_lu_;
    Index n_;
};

struct OrthAppendResult {
    DenseMatrix basis;
    Index appended = 0;
    Index deflated = 0;
};

/// Extend an orthonormal basis with new columns via Gram-Schmidt with one
/// reorthogonalization pass. Columns whose norm drops below deflation_tol
/// times their original norm are dropped and counted.
inline OrthAppendResult orth_append(const DenseMatrix& s_old, const DenseMatrix& cols,
                                    double deflation_tol = 1e-10) {
    const Index n = cols.rows();
    if (s_old.size() > 0 && s_old.rows() != n) {
        throw DimensionMismatchError("basis and new columns have different row counts");
    }
    const Index k0 = s_old.size() > 0 ? s_old.cols() : 0;
    OrthAppendResult out;
    out.basis.resize(n, k0 + cols.cols());
    if (k0 > 0) {
        out.basis.leftCols(k0) = s_old;
    }
    Index k = k0;
    for (Index j = 0; j < cols.cols(); ++j) {
        Vector v = cols.col(j);
        const double norm0 = v.norm();
        if (norm0 == 0.0) {
            ++out.deflated;
            continue;
        }
        for (int pass = 0; pass < 2; ++pass) {
            if (k > 0) {
                v -= out.basis.leftCols(k) * (out.basis.leftCols(k).transpose() * v);
            }
        }
        const double norm1 = v.norm();
        if (norm1 <= deflation_tol * norm0) {
            ++out.deflated;
            continue;
        }
        out.basis.col(k) = v / norm1;
        ++k;
    }
    out.basis.conservativeResize(n, k);
    out.appended = k - k0;
    return out;
}

/// Principal angles between two equal-dimension subspaces given by
/// orthonormal bases, ascending. Small angles are computed from sines of the
/// residual Y - X (X^T Y), which stays accurate where arccos saturates.
inline Vector principal_angles(const DenseMatrix& x, const DenseMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw DimensionMismatchError("principal angles need equal-dimension bases");
    }
    const Index k = x.cols();
    Vector theta(k);
    if (k == 0) {
        return theta;
    }
    const DenseMatrix c = x.transpose() * y;
    const Vector sc = svd(c).s;
    const Vector ss = svd(DenseMatrix(y - x * c)).s;
    for (Index i = 0; i < k; ++i) {
        const double cv = std::clamp(sc(i), -1.0, 1.0);
        if (cv * cv > 0.5) {
            theta(i) = std::asin(std::clamp(ss(k - 1 - i), 0.0, 1.0));
        } else {
            theta(i) = std::acos(cv);
        }
    }
    return theta;
}

/// Largest angle by which range(x) leaves range(y); zero when nested.
inline double inclusion_angle(const DenseMatrix& x, const DenseMatrix& y) {
    if (x.rows() != y.rows()) {
        throw DimensionMismatchError("inclusion angle needs bases with equal row counts");
    }
    if (x.cols() == 0) {
        return 0.0;
    }
    const DenseMatrix r = x - y * (y.transpose() * x);
    const Vector s = svd(r).s;
    return std::asin(std::clamp(s(0), 0.0, 1.0));
}

} // namespace gdrop
