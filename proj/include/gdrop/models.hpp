#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gdrop/structured_system.hpp"
#include "gdrop/training_set.hpp"

namespace gdrop {

/// Frequency grid description attached to a benchmark or config.
struct GridSpec {
    double wmin = 1e-1;
    double wmax = 1e3;
    Index n = 100;
    bool log_spacing = true;

    TrainingSet make() const {
        return log_spacing ? TrainingSet::log_grid(wmin, wmax, n)
                           : TrainingSet::linear_grid(wmin, wmax, n);
    }

    /// Points of a denser evaluation grid over the same range.
    std::vector<Complex> evaluation_points(Index factor = 2) const {
        const TrainingSet ts = log_spacing ? TrainingSet::log_grid(wmin, wmax, factor * n)
                                           : TrainingSet::linear_grid(wmin, wmax, factor * n);
        return ts.points();
    }
};

/// LTI benchmark: three weakly damped rotational blocks plus a long stable
/// diagonal, B = C^T emphasizing the oscillatory states. K(s) = s I - A.
inline StructuredSystem gen_fom(Index n = 1006, bool allow_scaled = false) {
    if (n != 1006 && !allow_scaled) {
        throw UnsupportedSizeError("canonical size is n = 1006; pass the scaling flag for others");
    }
    if (n < 7) {
        throw UnsupportedSizeError("the family needs n >= 7");
    }
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(n) + 6);
    const double rot[3] = {100.0, 200.0, 400.0};
    for (int b = 0; b < 3; ++b) {
        const int at = 2 * b;
        entries.emplace_back(at, at, -1.0);
        entries.emplace_back(at, at + 1, rot[b]);
        entries.emplace_back(at + 1, at, -rot[b]);
        entries.emplace_back(at + 1, at + 1, -1.0);
    }
    for (Index i = 6; i < n; ++i) {
        entries.emplace_back(static_cast<int>(i), static_cast<int>(i),
                             -static_cast<double>(i - 5));
    }
    SparseRealMatrix a(n, n);
    a.setFromTriplets(entries.begin(), entries.end());
    DenseMatrix b(n, 1);
    b.setOnes();
    b.topRows(6).setConstant(10.0);
    DenseMatrix c = b.transpose();
    std::vector<Term> terms;
    terms.push_back({CoeffMatrix::identity(n), ScalarFunction::power(1)});
    terms.push_back({CoeffMatrix(std::move(a)), ScalarFunction::constant(-1.0)});
    return StructuredSystem(std::move(terms), std::move(b), std::move(c));
}

inline SparseRealMatrix laplacian_1d(Index n) {
    const double h = 1.0 / static_cast<double>(n + 1);
    const double w = 1.0 / (h * h);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(3 * n));
    for (Index i = 0; i < n; ++i) {
        entries.emplace_back(static_cast<int>(i), static_cast<int>(i), -2.0 * w);
        if (i + 1 < n) {
            entries.emplace_back(static_cast<int>(i), static_cast<int>(i + 1), w);
            entries.emplace_back(static_cast<int>(i + 1), static_cast<int>(i), w);
        }
    }
    SparseRealMatrix a(n, n);
    a.setFromTriplets(entries.begin(), entries.end());
    return a;
}

/// Heated rod with delayed feedback cooling:
/// K(s) = s I - A - e^{-tau s} A_tau. A is the Dirichlet FD Laplacian,
/// A_tau = -kappa I with kappa half the magnitude of the slowest diffusion
/// mode, so the feedback perturbs rather than dominates the dynamics.
inline StructuredSystem gen_delay_rod(Index n, double tau = 3.0) {
    if (n < 3) {
        throw UnsupportedSizeError("the rod needs n >= 3 interior nodes");
    }
    const double h = 1.0 / static_cast<double>(n + 1);
    const double sin_half = std::sin(std::numbers::pi * h / 2.0);
    const double kappa = 0.5 * (4.0 / (h * h)) * sin_half * sin_half;
    SparseRealMatrix a_tau(n, n);
    a_tau.setIdentity();
    a_tau *= -kappa;
    DenseMatrix b(n, 1);
    b.setConstant(h);
    DenseMatrix c(1, n);
    c.setConstant(1.0 / static_cast<double>(n));
    std::vector<Term> terms;
    terms.push_back({CoeffMatrix::identity(n), ScalarFunction::power(1)});
    terms.push_back({CoeffMatrix(laplacian_1d(n)), ScalarFunction::constant(-1.0)});
    terms.push_back({CoeffMatrix(std::move(a_tau)),
                     ScalarFunction::scaled(-1.0, ScalarFunction::exponential(-tau))});
    return StructuredSystem(std::move(terms), std::move(b), std::move(c));
}

/// Heat equation with fading memory on a square grid:
/// K(s) = s I - A + (1/(s+gamma)) A with the 2-D FD Laplacian A.
/// B and C are fixed-seed unit-norm sign vectors.
inline StructuredSystem gen_fading_memory(Index grid_side, double gamma = 1.05,
                                          unsigned seed = 42) {
    if (grid_side < 4) {
        throw UnsupportedSizeError("the grid needs at least 4 nodes per side");
    }
    const Index n = grid_side * grid_side;
    const double h = 1.0 / static_cast<double>(grid_side + 1);
    const double w = 1.0 / (h * h);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(5 * n));
    const auto node = [grid_side](Index ix, Index iy) {
        return static_cast<int>(iy * grid_side + ix);
    };
    for (Index iy = 0; iy < grid_side; ++iy) {
        for (Index ix = 0; ix < grid_side; ++ix) {
            entries.emplace_back(node(ix, iy), node(ix, iy), -4.0 * w);
            if (ix + 1 < grid_side) {
                entries.emplace_back(node(ix, iy), node(ix + 1, iy), w);
                entries.emplace_back(node(ix + 1, iy), node(ix, iy), w);
            }
            if (iy + 1 < grid_side) {
                entries.emplace_back(node(ix, iy), node(ix, iy + 1), w);
                entries.emplace_back(node(ix, iy + 1), node(ix, iy), w);
            }
        }
    }
    SparseRealMatrix a(n, n);
    a.setFromTriplets(entries.begin(), entries.end());
    std::mt19937 rng(seed);
    const auto sign_vector = [&rng](Index len) {
        Vector v(len);
        for (Index i = 0; i < len; ++i) {
            v(i) = (rng() & 1u) ? 1.0 : -1.0;
        }
        v /= v.norm();
        return v;
    };
    DenseMatrix b = sign_vector(n);
    DenseMatrix c = sign_vector(n).transpose();
    std::vector<Term> terms;
    terms.push_back({CoeffMatrix::identity(n), ScalarFunction::power(1)});
    terms.push_back({CoeffMatrix(a), ScalarFunction::constant(-1.0)});
    terms.push_back({CoeffMatrix(a), ScalarFunction::shifted_rational(gamma)});
    return StructuredSystem(std::move(terms), std::move(b), std::move(c));
}

/// Mass-spring-damper chain: K(s) = s^2 M + s E + K with diagonal masses,
/// tridiagonal stiffness and proportional damping E = damping * K. Meant for
/// Galerkin (W = V) reduction, which keeps the reduced blocks symmetric.
inline StructuredSystem gen_second_order(Index n_dof, double damping = 1e-6) {
    if (n_dof < 2) {
        throw UnsupportedSizeError("the chain needs n_dof >= 2");
    }
    std::vector<Eigen::Triplet<double>> mass;
    std::vector<Eigen::Triplet<double>> stiff;
    mass.reserve(static_cast<std::size_t>(n_dof));
    stiff.reserve(static_cast<std::size_t>(3 * n_dof));
    for (Index i = 0; i < n_dof; ++i) {
        mass.emplace_back(static_cast<int>(i), static_cast<int>(i),
                          1.0 + 0.1 * static_cast<double>(i % 5));
        stiff.emplace_back(static_cast<int>(i), static_cast<int>(i), 2.0);
        if (i + 1 < n_dof) {
            stiff.emplace_back(static_cast<int>(i), static_cast<int>(i + 1), -1.0);
            stiff.emplace_back(static_cast<int>(i + 1), static_cast<int>(i), -1.0);
        }
    }
    SparseRealMatrix m(n_dof, n_dof);
    m.setFromTriplets(mass.begin(), mass.end());
    SparseRealMatrix k(n_dof, n_dof);
    k.setFromTriplets(stiff.begin(), stiff.end());
    SparseRealMatrix e = damping * k;
    DenseMatrix b = DenseMatrix::Zero(n_dof, 1);
    b(0, 0) = 1.0;
    DenseMatrix c = DenseMatrix::Zero(1, n_dof);
    c(0, n_dof - 1) = 1.0;
    std::vector<Term> terms;
    terms.push_back({CoeffMatrix(std::move(m)), ScalarFunction::power(2)});
    terms.push_back({CoeffMatrix(std::move(e)), ScalarFunction::power(1)});
    terms.push_back({CoeffMatrix(std::move(k)), ScalarFunction::constant(1.0)});
    return StructuredSystem(std::move(terms), std::move(b), std::move(c));
}

struct BenchmarkRequest {
    std::string kind;
    Index n = 0;
    double tau = 3.0;
    double gamma = 1.05;
    double damping = 1e-6;
    unsigned seed = 42;
    bool allow_scaled = true;
};

struct BenchmarkBundle {
    StructuredSystem system;
    GridSpec grid;
    bool galerkin_default = false;
};

/// Build a named benchmark with its default frequency grid. Sizes of zero
/// select the canonical order.
inline BenchmarkBundle make_benchmark(const BenchmarkRequest& req) {
    if (req.kind == "fom") {
        const Index n = req.n > 0 ? req.n : 1006;
        StructuredSystem sys = gen_fom(n, req.allow_scaled);
        return {std::move(sys), GridSpec{1e-1, 1e3, n, true}, false};
    }
    if (req.kind == "delay-rod") {
        const Index n = req.n > 0 ? req.n : 1200;
        StructuredSystem sys = gen_delay_rod(n, req.tau);
        return {std::move(sys), GridSpec{1e-3, 1e3, n, true}, false};
    }
    if (req.kind == "fading-memory") {
        const Index gs = req.n > 0 ? req.n : 128;
        StructuredSystem sys = gen_fading_memory(gs, req.gamma, req.seed);
        return {std::move(sys), GridSpec{1e-2, 1e4, 100, true}, false};
    }
    if (req.kind == "second-order") {
        const Index n = req.n > 0 ? req.n : 500;
        StructuredSystem sys = gen_second_order(n, req.damping);
        return {std::move(sys), GridSpec{1e-2, 1e1, 100, true}, true};
    }
    throw ParseError("unknown benchmark kind: " + req.kind);
}

} // namespace gdrop
