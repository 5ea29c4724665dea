#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gdrop/linalg.hpp"
#include "gdrop/structured_system.hpp"
#include "gdrop/sylvester.hpp"
#include "gdrop/training_set.hpp"

namespace gdrop {

/// Raw (non-orthonormalized) projection bases: V collects realified shifted
/// solves with B, W the transposed solves with C^T. In Galerkin mode W is
/// not stored and V plays both roles.
struct SubspacePair {
    DenseMatrix v;
    DenseMatrix w;
    bool galerkin = false;

    const DenseMatrix& w_effective() const { return galerkin ? v : w; }
};

/// Direct basis construction: one large solve per training representative
/// and side.
inline SubspacePair build_bases_direct(const StructuredSystem& sys, const TrainingSet& ts,
                                       bool galerkin = false) {
    const Index n = sys.order();
    SubspacePair pair;
    pair.galerkin = galerkin;
    {
        const DenseMatrix& b = sys.input_matrix();
        DenseComplexMatrix cols(n, ts.size() * b.cols());
        for (Index j = 0; j < ts.size(); ++j) {
            cols.middleCols(j * b.cols(), b.cols()) = shifted_solve(sys, ts.point(j), b, false);
        }
        pair.v = realify_coefficients(cols, ts, b.cols());
    }
    if (!galerkin) {
        const DenseMatrix ct = sys.output_matrix().transpose();
        DenseComplexMatrix cols(n, ts.size() * ct.cols());
        for (Index j = 0; j < ts.size(); ++j) {
            cols.middleCols(j * ct.cols(), ct.cols()) = shifted_solve(sys, ts.point(j), ct, true);
        }
        pair.w = realify_coefficients(cols, ts, ct.cols());
    }
    return pair;
}

/// SVDs of the projected term blocks G_i = W^T A_i V, concatenated
/// horizontally (left vectors and first trace) and vertically (right vectors
/// and second trace).
struct DominantSvd {
    SvdResult horizontal;
    SvdResult vertical;
};

inline DominantSvd dominant_svd_direct(const StructuredSystem& sys, const SubspacePair& pair) {
    const DenseMatrix& v = pair.v;
    const DenseMatrix& w = pair.w_effective();
    const Index nv = v.cols();
    const Index nw = w.cols();
    const Index l = sys.num_terms();
    DenseMatrix mh(nw, l * nv);
    DenseMatrix mv(l * nw, nv);
    for (Index i = 0; i < l; ++i) {
        const DenseMatrix g = w.transpose() * sys.term(i).matrix.apply(v);
        mh.middleCols(i * nv, nv) = g;
        mv.middleRows(i * nw, nw) = g;
    }
    return {svd(mh), svd(mv)};
}

/// Smallest order whose discarded tail of each trace is below tol of the
/// trace sum; an explicit override is capped at the available rank.
inline Index choose_order(const Vector& sigma1, const Vector& sigma2, double tol,
                          std::optional<Index> r_override = {}) {
    const Index k = std::min(sigma1.size(), sigma2.size());
    if (r_override) {
        return std::clamp<Index>(*r_override, 0, k);
    }
    const auto pick = [tol](const Vector& s) -> Index {
        std::vector<double> suffix(static_cast<std::size_t>(s.size()) + 1, 0.0);
        for (Index i = s.size() - 1; i >= 0; --i) {
            suffix[static_cast<std::size_t>(i)] = suffix[static_cast<std::size_t>(i) + 1] + s(i);
        }
        const double total = suffix[0];
        if (total <= 0.0) {
            return 0;
        }
        for (Index r = 0; r <= s.size(); ++r) {
            if (suffix[static_cast<std::size_t>(r)] / total < tol) {
                return r;
            }
        }
        return s.size();
    };
    return std::min({pick(sigma1), pick(sigma2), k});
}

/// Reduced system together with the projection data that produced it.
struct RomRealization {
    StructuredSystem system;
    DenseMatrix v_p;
    DenseMatrix w_p;
    Vector sigma1;
    Vector sigma2;
    bool galerkin = false;
};

inline RomRealization assemble_rom(const StructuredSystem& sys, DenseMatrix vp, DenseMatrix wp,
                                   bool galerkin, Vector sigma1, Vector sigma2) {
    std::vector<Term> terms;
    terms.reserve(static_cast<std::size_t>(sys.num_terms()));
    for (Index i = 0; i < sys.num_terms(); ++i) {
        DenseMatrix a_hat = wp.transpose() * sys.term(i).matrix.apply(vp);
        terms.push_back({CoeffMatrix(std::move(a_hat)), sys.term(i).function});
    }
    DenseMatrix b_hat = wp.transpose() * sys.input_matrix();
    DenseMatrix c_hat = sys.output_matrix() * vp;
    StructuredSystem rom(std::move(terms), std::move(b_hat), std::move(c_hat));
    return {std::move(rom), std::move(vp), std::move(wp), std::move(sigma1), std::move(sigma2),
            galerkin};
}

/// Petrov-Galerkin projection onto the dominant directions of the term
/// blocks: V_p = V * V2(:, 1:r), W_p = W * W1(:, 1:r).
inline RomRealization project(const StructuredSystem& sys, const SubspacePair& pair,
                              const DominantSvd& svds, Index r) {
    r = std::clamp<Index>(r, 0, std::min(svds.horizontal.u.cols(), svds.vertical.vt.rows()));
    DenseMatrix vp = pair.v * svds.vertical.vt.topRows(r).transpose();
    DenseMatrix wp = pair.galerkin ? vp : DenseMatrix(pair.w * svds.horizontal.u.leftCols(r));
    return assemble_rom(sys, std::move(vp), std::move(wp), pair.galerkin,
                        svds.horizontal.s.head(r), svds.vertical.s.head(r));
}

struct LowRankProjection {
    DenseMatrix v_p;
    DenseMatrix w_p;
    Vector sigma1;
    Vector sigma2;
    Index r = 0;
};

/// Dominant projection computed from the sampled factorizations V ~ S_v Z,
/// W ~ S_w Y without ever forming V or W: the term blocks shrink to
/// H_i = Sigma_y U_y^T (S_w^T A_i S_v) U_z Sigma_z, whose concatenated SVDs
/// carry exactly the singular values of the direct method's blocks. Pass a
/// null W basis for Galerkin mode (W_p = V_p).
inline LowRankProjection dominant_svd_lowrank(const StructuredSystem& sys, const LowRankBasis& bv,
                                              const LowRankBasis* bw, const TrainingSet& ts,
                                              double tol, std::optional<Index> r_override = {},
                                              const TrainingSet* ts_w = nullptr) {
    const Index n_points = ts.size();
    if (n_points == 0 || bv.z.cols() == 0 || bv.z.cols() % n_points != 0) {
        throw DimensionMismatchError("sampled coefficients do not match the training set");
    }
    const Index l = sys.num_terms();

    const DenseMatrix z_real = realify_coefficients(bv.z, ts, bv.z.cols() / n_points);
    const SvdResult zs = svd(z_real);

    SvdResult ys;
    if (bw) {
        const TrainingSet& tw = ts_w ? *ts_w : ts;
        if (tw.size() == 0 || bw->z.cols() == 0 || bw->z.cols() % tw.size() != 0) {
            throw DimensionMismatchError("sampled coefficients do not match the training set");
        }
        ys = svd(realify_coefficients(bw->z, tw, bw->z.cols() / tw.size()));
    } else {
        ys = zs;
    }

    const Index kz = zs.s.size();
    const Index ky = ys.s.size();
    DenseMatrix mh(ky, l * kz);
    DenseMatrix mv(l * ky, kz);
    for (Index i = 0; i < l; ++i) {
        DenseMatrix g;
        if (bw) {
            g = bw->cached_products[static_cast<std::size_t>(i)].transpose() * bv.s;
        } else {
            g = bv.s.transpose() * bv.cached_products[static_cast<std::size_t>(i)];
        }
        const DenseMatrix h = ys.s.asDiagonal() * (ys.u.transpose() * g * zs.u) * zs.s.asDiagonal();
        mh.middleCols(i * kz, kz) = h;
        mv.middleRows(i * ky, ky) = h;
    }
    const SvdResult sh = svd(mh);
    const SvdResult sv = svd(mv);

    LowRankProjection out;
    out.r = choose_order(sh.s, sv.s, tol, r_override);
    out.r = std::min({out.r, sh.u.cols(), static_cast<Index>(sv.vt.rows())});
    out.sigma1 = sh.s.head(out.r);
    out.sigma2 = sv.s.head(out.r);
    out.v_p = bv.s * (zs.u * (zs.s.asDiagonal() * sv.vt.topRows(out.r).transpose()));
    if (bw) {
        out.w_p = bw->s * (ys.u * (ys.s.asDiagonal() * sh.u.leftCols(out.r)));
    } else {
        out.w_p = out.v_p;
    }
    return out;
}

/// Relative transfer error e(s) = sigma_max(H_rom(s) - H(s)) / max_grid
/// sigma_max(H(s)) over an evaluation grid.
struct TransferErrorMetric {
    std::vector<double> pointwise;
    double max_error = 0.0;
    double normalization = 0.0;
};

inline double transfer_gain(const DenseComplexMatrix& h) {
    if (h.rows() == 1 && h.cols() == 1) {
        return std::abs(h(0, 0));
    }
    return Eigen::JacobiSVD<DenseComplexMatrix>(h).singularValues()(0);
}

inline TransferErrorMetric rom_error_metric(const StructuredSystem& fom,
                                            const StructuredSystem& rom,
                                            const std::vector<Complex>& grid) {
    TransferErrorMetric metric;
    metric.pointwise.reserve(grid.size());
    std::vector<double> abs_err;
    abs_err.reserve(grid.size());
    for (Complex s : grid) {
        const DenseComplexMatrix h = eval_transfer(fom, s);
        const DenseComplexMatrix hr = eval_transfer(rom, s);
        abs_err.push_back(transfer_gain(DenseComplexMatrix(hr - h)));
        metric.normalization = std::max(metric.normalization, transfer_gain(h));
    }
    for (double e : abs_err) {
        const double rel = metric.normalization > 0.0 ? e / metric.normalization : e;
        metric.pointwise.push_back(rel);
        metric.max_error = std::max(metric.max_error, rel);
    }
    return metric;
}

} // namespace gdrop
