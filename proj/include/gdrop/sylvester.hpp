#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "gdrop/linalg.hpp"
#include "gdrop/structured_system.hpp"
#include "gdrop/training_set.hpp"

namespace gdrop {

enum class Side { reachability, observability };

/// Solve K(sigma)^-1 * rhs (or K(sigma)^-T * rhs). This is the only code path
/// for large shifted solves, shared by the direct method and the sampler.
inline DenseComplexMatrix shifted_solve(const StructuredSystem& sys, Complex sigma,
                                        const DenseMatrix& rhs, bool transposed) {
    return factorize_K(sys, sigma, transposed).solve(rhs.cast<Complex>());
}

/// Block Sylvester equation sum_i A_i V F_i = rhs * 1^T over a training set.
/// The reachability side uses rhs = B; the observability side solves the
/// transposed equation with rhs = C^T.
struct SylvesterProblem {
    Side side = Side::reachability;
    const StructuredSystem* system = nullptr;
    TrainingSet training;
    DenseMatrix rhs;

    static SylvesterProblem reachability(const StructuredSystem& sys, TrainingSet ts) {
        return {Side::reachability, &sys, std::move(ts), sys.input_matrix()};
    }

    static SylvesterProblem observability(const StructuredSystem& sys, TrainingSet ts) {
        return {Side::observability, &sys, std::move(ts), sys.output_matrix().transpose()};
    }

    bool transposed() const { return side == Side::observability; }

    /// Columns per training point.
    Index width() const { return rhs.cols(); }
};

/// Low-rank factorization V ~ S * Z of the Sylvester solution. S is a real
/// orthonormal range basis; Z holds one complex coefficient block per
/// training representative. cached_products keeps A_i * S (or A_i^T * S) in
/// sync with S so residuals never touch the full operators.
struct LowRankBasis {
    DenseMatrix s;
    DenseComplexMatrix z;
    std::vector<DenseMatrix> cached_products;
    std::vector<Index> selected_points;
};

inline LowRankBasis make_empty_basis(const SylvesterProblem& p) {
    LowRankBasis b;
    const Index n = p.system->order();
    b.s.resize(n, 0);
    b.cached_products.assign(static_cast<std::size_t>(p.system->num_terms()), DenseMatrix(n, 0));
    return b;
}

/// Split a complex solution block into real columns: [Re, Im] for a
/// conjugate-pair representative, [Re] for a real point.
inline DenseMatrix realify_block(const DenseComplexMatrix& sol, bool is_real_point) {
    if (is_real_point) {
        return sol.real();
    }
    DenseMatrix out(sol.rows(), 2 * sol.cols());
    out.leftCols(sol.cols()) = sol.real();
    out.rightCols(sol.cols()) = sol.imag();
    return out;
}

/// Realify every coefficient block of Z in training order.
inline DenseMatrix realify_coefficients(const DenseComplexMatrix& z, const TrainingSet& ts,
                                        Index width) {
    const Index n_rows = z.rows();
    Index total = 0;
    for (Index j = 0; j < ts.size(); ++j) {
        total += ts.is_real_point(j) ? width : 2 * width;
    }
    DenseMatrix out(n_rows, total);
    Index at = 0;
    for (Index j = 0; j < ts.size(); ++j) {
        const DenseComplexMatrix block = z.middleCols(j * width, width);
        const DenseMatrix rb = realify_block(block, ts.is_real_point(j));
        out.middleCols(at, rb.cols()) = rb;
        at += rb.cols();
    }
    return out;
}

/// Append A_i * cols (or A_i^T * cols) to each cached product.
inline void update_cached_products(const SylvesterProblem& p, LowRankBasis& basis,
                                   const DenseMatrix& appended) {
    if (appended.cols() == 0) {
        return;
    }
    const StructuredSystem& sys = *p.system;
    if (appended.rows() != sys.order()) {
        throw DimensionMismatchError("appended basis columns have wrong row count");
    }
    if (basis.cached_products.size() != static_cast<std::size_t>(sys.num_terms())) {
        throw DimensionMismatchError("cached products were not initialized for this system");
    }
    for (Index i = 0; i < sys.num_terms(); ++i) {
        DenseMatrix block = sys.term(i).matrix.apply(appended, p.transposed());
        DenseMatrix& cache = basis.cached_products[static_cast<std::size_t>(i)];
        const Index k0 = cache.cols();
        cache.conservativeResize(appended.rows(), k0 + block.cols());
        cache.rightCols(block.cols()) = block;
    }
}

/// Columnwise solve of the projected equation: for every training point,
/// z_j = (sum_i f_i(sigma_j) S^T A_i S)^-1 S^T rhs.
inline DenseComplexMatrix solve_projected(const SylvesterProblem& p, const LowRankBasis& basis) {
    const StructuredSystem& sys = *p.system;
    const Index np = basis.s.cols();
    const Index n_points = p.training.size();
    const Index w = p.width();
    std::vector<DenseComplexMatrix> ahat(static_cast<std::size_t>(sys.num_terms()));
    for (Index i = 0; i < sys.num_terms(); ++i) {
        ahat[static_cast<std::size_t>(i)] =
            DenseMatrix(basis.s.transpose() * basis.cached_products[static_cast<std::size_t>(i)])
                .cast<Complex>();
    }
    const DenseComplexMatrix bhat = (basis.s.transpose() * p.rhs).cast<Complex>();
    DenseComplexMatrix z(np, n_points * w);
    DenseComplexMatrix pencil(np, np);
    for (Index j = 0; j < n_points; ++j) {
        const Complex sigma = p.training.point(j);
        pencil.setZero();
        for (Index i = 0; i < sys.num_terms(); ++i) {
            pencil += sys.term(i).function(sigma) * ahat[static_cast<std::size_t>(i)];
        }
        const Eigen::PartialPivLU<DenseComplexMatrix> lu(pencil);
        if (lu_is_singular(lu)) {
            throw SingularProjectedPencilError(static_cast<std::size_t>(j), sigma);
        }
        z.middleCols(j * w, w) = lu.solve(bhat);
    }
    return z;
}

/// Per-point residual norms of the approximation V = S * Z, computed from the
/// cached products without forming the n x (N * width) residual.
struct ResidualReport {
    Vector column_norms;
    double mean_error = 0.0;
    double mean_error_rel = 0.0;
    Index max_index = -1;
};

inline ResidualReport residual(const SylvesterProblem& p, const LowRankBasis& basis,
                               const DenseComplexMatrix& z) {
    const StructuredSystem& sys = *p.system;
    const Index n = sys.order();
    const Index n_points = p.training.size();
    const Index w = p.width();
    const Index l = sys.num_terms();
    std::vector<DenseComplexMatrix> cache_c(static_cast<std::size_t>(l));
    for (Index i = 0; i < l; ++i) {
        cache_c[static_cast<std::size_t>(i)] =
            basis.cached_products[static_cast<std::size_t>(i)].cast<Complex>();
    }
    const DenseComplexMatrix rhs_c = p.rhs.cast<Complex>();
    ResidualReport rep;
    rep.column_norms.resize(n_points);
    const Index chunk = std::max<Index>(1, 128 / std::max<Index>(1, w));
    DenseComplexMatrix acc;
    DenseComplexMatrix zs;
    for (Index j0 = 0; j0 < n_points; j0 += chunk) {
        const Index jc = std::min(chunk, n_points - j0);
        acc.setZero(n, jc * w);
        for (Index i = 0; i < l; ++i) {
            zs = z.middleCols(j0 * w, jc * w);
            for (Index jj = 0; jj < jc; ++jj) {
                zs.middleCols(jj * w, w) *= sys.term(i).function(p.training.point(j0 + jj));
            }
            acc.noalias() += cache_c[static_cast<std::size_t>(i)] * zs;
        }
        for (Index jj = 0; jj < jc; ++jj) {
            acc.middleCols(jj * w, w) -= rhs_c;
            rep.column_norms(j0 + jj) = acc.middleCols(jj * w, w).norm();
        }
    }
    double sum = 0.0;
    for (Index j = 0; j < n_points; ++j) {
        sum += rep.column_norms(j);
    }
    rep.mean_error = n_points > 0 ? sum / static_cast<double>(n_points) : 0.0;
    const double rhs_norm = p.rhs.norm();
    rep.mean_error_rel = rhs_norm > 0.0 ? rep.mean_error / rhs_norm : rep.mean_error;
    for (Index j = 0; j < n_points; ++j) {
        if (rep.max_index < 0 || rep.column_norms(j) > rep.column_norms(rep.max_index)) {
            rep.max_index = j;
        }
    }
    return rep;
}

/// Full residual sum_i (A_i S) Z F_i - rhs * 1^T, for diagnostics and tests.
inline DenseComplexMatrix residual_raw(const SylvesterProblem& p, const LowRankBasis& basis,
                                       const DenseComplexMatrix& z) {
    const StructuredSystem& sys = *p.system;
    const Index n = sys.order();
    const Index n_points = p.training.size();
    const Index w = p.width();
    DenseComplexMatrix r(n, n_points * w);
    for (Index j = 0; j < n_points; ++j) {
        DenseComplexMatrix block = -p.rhs.cast<Complex>();
        for (Index i = 0; i < sys.num_terms(); ++i) {
            const Complex f = sys.term(i).function(p.training.point(j));
            block.noalias() += f * (basis.cached_products[static_cast<std::size_t>(i)].cast<Complex>() *
                                    z.middleCols(j * w, w));
        }
        r.middleCols(j * w, w) = block;
    }
    return r;
}

inline constexpr double kFilterSharpness = 0.6;
inline constexpr double kFilterFloor = 1e-15;

/// Damping applied to residual scores near an already-selected point:
/// zero at equal magnitudes, approaching one far away.
inline double filter_value(Complex s, Complex sigma_selected) {
    const double d = std::log(std::abs(s) + kFilterFloor) - std::log(std::abs(sigma_selected) + kFilterFloor);
    return 1.0 - std::exp(-kFilterSharpness * d * d);
}

/// Pick up to count unselected points by largest residual norm, damping the
/// scores around each pick before taking the next. Ties go to the lowest
/// index.
inline std::vector<Index> select_points(const ResidualReport& report, const TrainingSet& training,
                                        Index count) {
    const Index n_points = training.size();
    if (report.column_norms.size() != n_points) {
        throw DimensionMismatchError("residual report does not match the training set");
    }
    std::vector<double> score(static_cast<std::size_t>(n_points));
    std::vector<char> eligible(static_cast<std::size_t>(n_points));
    for (Index j = 0; j < n_points; ++j) {
        score[static_cast<std::size_t>(j)] = report.column_norms(j);
        eligible[static_cast<std::size_t>(j)] = training.selected(j) ? 0 : 1;
    }
    std::vector<Index> picks;
    for (Index t = 0; t < count; ++t) {
        Index best = -1;
        double best_score = 0.0;
        for (Index j = 0; j < n_points; ++j) {
            if (!eligible[static_cast<std::size_t>(j)]) {
                continue;
            }
            if (best < 0 || score[static_cast<std::size_t>(j)] > best_score) {
                best = j;
                best_score = score[static_cast<std::size_t>(j)];
            }
        }
        if (best < 0) {
            break;
        }
        picks.push_back(best);
        eligible[static_cast<std::size_t>(best)] = 0;
        const Complex sel = training.point(best);
        for (Index j = 0; j < n_points; ++j) {
            if (eligible[static_cast<std::size_t>(j)]) {
                score[static_cast<std::size_t>(j)] *= filter_value(training.point(j), sel);
            }
        }
    }
    if (picks.empty() && count > 0) {
        throw ExhaustedError("no eligible training points remain for selection");
    }
    return picks;
}

struct IterationRecord {
    Index iteration = 0;
    std::vector<Index> new_points;
    Index basis_cols = 0;
    Index solve_count = 0;
    double mean_error = 0.0;
    double mean_error_rel = 0.0;
    double elapsed_seconds = 0.0;
};

struct ActiveSampleOptions {
    double tol = 1e-3;
    Index batch = 3;
    /// Cap on selected representatives; 0 means ceil(N / 4).
    Index max_points = 0;
    /// Seed selection; defaults to the smallest-magnitude point.
    std::vector<Index> initial_points;
    double deflation_tol = 1e-10;
    std::function<void(const IterationRecord&, const LowRankBasis&, const ResidualReport&)> observer;
};

struct ActiveSampleResult {
    LowRankBasis basis;
    TrainingSet training;
    /// Points the final coefficients Z cover: the training set minus any
    /// points excluded because K(sigma) was singular there.
    TrainingSet evaluation_training;
    std::vector<IterationRecord> iterations;
    std::vector<Index> skipped_points;
    Index solve_count = 0;
    bool converged = false;
    bool budget_exhausted = false;
    bool training_exhausted = false;
};

/// Greedy residual-driven sampling: grow S from shifted solves at selected
/// points until the mean relative residual over the training set drops below
/// tol, the point budget is spent, or the set is exhausted. Points where
/// K(sigma) is singular are skipped and marked ineligible.
inline ActiveSampleResult active_sample(const SylvesterProblem& p,
                                        const ActiveSampleOptions& opts = {}) {
    const StructuredSystem& sys = *p.system;
    const Index n_points = p.training.size();
    if (n_points == 0) {
        throw DimensionMismatchError("active sampling needs a non-empty training set");
    }
    if (opts.batch < 1) {
        throw DimensionMismatchError("batch size must be at least 1");
    }
    const Index max_points = opts.max_points > 0 ? opts.max_points : (n_points + 3) / 4;

    ActiveSampleResult result;
    result.training = p.training;
    result.training.clear_selection();
    result.basis = make_empty_basis(p);
    TrainingSet& ts = result.training;
    SylvesterProblem local = p;
    std::vector<char> skipped_mask(static_cast<std::size_t>(n_points), 0);

    const auto t_start = std::chrono::steady_clock::now();
    std::vector<Index> pending_new;

    const auto try_append = [&](Index idx) -> bool {
        const Complex sigma = ts.point(idx);
        ts.mark_selected(idx);
        DenseComplexMatrix sol;
        try {
            sol = shifted_solve(sys, sigma, p.rhs, p.transposed());
        } catch (const SingularKError&) {
            result.skipped_points.push_back(idx);
            skipped_mask[static_cast<std::size_t>(idx)] = 1;
            return false;
        }
        ++result.solve_count;
        const DenseMatrix cols = realify_block(sol, ts.is_real_point(idx));
        OrthAppendResult oa = orth_append(result.basis.s, cols, opts.deflation_tol);
        const DenseMatrix appended = oa.basis.rightCols(oa.appended);
        result.basis.s = std::move(oa.basis);
        update_cached_products(local, result.basis, appended);
        result.basis.selected_points.push_back(idx);
        pending_new.push_back(idx);
        return true;
    };

    std::vector<Index> init = opts.initial_points;
    if (init.empty()) {
        init.push_back(ts.smallest_magnitude_unselected());
    }
    for (Index idx : init) {
        if (idx < 0 || idx >= n_points) {
            throw DimensionMismatchError("initial point index out of range");
        }
        if (!ts.selected(idx)) {
            try_append(idx);
        }
    }
    while (result.basis.s.cols() == 0 && ts.num_unselected() > 0) {
        try_append(ts.smallest_magnitude_unselected());
    }
    if (result.basis.s.cols() == 0) {
        throw ExhaustedError("K(sigma) is singular at every training point");
    }

    std::vector<Index> eval_map;
    const auto rebuild_evaluation = [&]() {
        eval_map.clear();
        if (result.skipped_points.empty()) {
            local.training = ts;
            return;
        }
        std::vector<Complex> pts;
        for (Index j = 0; j < n_points; ++j) {
            if (!skipped_mask[static_cast<std::size_t>(j)]) {
                pts.push_back(ts.point(j));
                eval_map.push_back(j);
            }
        }
        local.training = TrainingSet::from_points(pts);
        for (std::size_t e = 0; e < eval_map.size(); ++e) {
            if (ts.selected(eval_map[e])) {
                local.training.mark_selected(static_cast<Index>(e));
            }
        }
    };

    for (Index k = 1;; ++k) {
        rebuild_evaluation();
        result.basis.z = solve_projected(local, result.basis);
        const ResidualReport rep = residual(local, result.basis, result.basis.z);

        IterationRecord rec;
        rec.iteration = k;
        rec.new_points = std::move(pending_new);
        pending_new.clear();
        rec.basis_cols = result.basis.s.cols();
        rec.solve_count = result.solve_count;
        rec.mean_error = rep.mean_error;
        rec.mean_error_rel = rep.mean_error_rel;
        rec.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        result.iterations.push_back(rec);
        if (opts.observer) {
            opts.observer(rec, result.basis, rep);
        }

        if (rep.mean_error_rel <= opts.tol) {
            result.converged = true;
            break;
        }
        if (static_cast<Index>(result.basis.selected_points.size()) >= max_points) {
            result.budget_exhausted = true;
            break;
        }
        if (ts.num_unselected() == 0) {
            result.training_exhausted = true;
            break;
        }
        const Index take = std::min(opts.batch, ts.num_unselected());
        const std::vector<Index> picks = select_points(rep, local.training, take);
        bool any = false;
        for (Index pick : picks) {
            const Index idx = eval_map.empty() ? pick : eval_map[static_cast<std::size_t>(pick)];
            if (try_append(idx)) {
                any = true;
            }
            if (static_cast<Index>(result.basis.selected_points.size()) >= max_points) {
                break;
            }
        }
        if (!any && ts.num_unselected() == 0) {
            result.training_exhausted = true;
            break;
        }
    }
    result.evaluation_training = local.training;
    return result;
}

/// Reference solver for small instances: independent dense solves at every
/// training representative.
inline DenseComplexMatrix dense_oracle_solve(const SylvesterProblem& p) {
    const StructuredSystem& sys = *p.system;
    if (sys.order() > 200 || p.training.size() > 64) {
        throw DimensionMismatchError("dense oracle is restricted to small instances");
    }
    const Index n = sys.order();
    const Index w = p.width();
    DenseComplexMatrix v(n, p.training.size() * w);
    for (Index j = 0; j < p.training.size(); ++j) {
        const Complex sigma = p.training.point(j);
        DenseComplexMatrix k = DenseComplexMatrix::Zero(n, n);
        for (Index i = 0; i < sys.num_terms(); ++i) {
            const Complex f = sys.term(i).function(sigma);
            const DenseMatrix a = sys.term(i).matrix.to_dense();
            if (p.transposed()) {
                k += f * a.transpose();
            } else {
                k += f * a;
            }
        }
        const Eigen::PartialPivLU<DenseComplexMatrix> lu(k);
        if (lu_is_singular(lu)) {
            throw SingularKError(sigma);
        }
        v.middleCols(j * w, w) = lu.solve(p.rhs.cast<Complex>());
    }
    return v;
}

} // namespace gdrop
