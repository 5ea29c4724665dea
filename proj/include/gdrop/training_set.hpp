#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "gdrop/errors.hpp"
#include "gdrop/matrix.hpp"

namespace gdrop {

/// Candidate expansion points, stored as upper-half-plane representatives.
///
/// A representative with nonzero imaginary part stands for the conjugate pair
/// {sigma, conj(sigma)}; real points stand for themselves. The selected mask
/// tracks points consumed by the active sampler (either used for the basis or
/// skipped as ineligible).
class TrainingSet {
public:
    TrainingSet() = default;

    /// Build from arbitrary points: conjugates are folded onto their
    /// upper-half-plane representative and exact duplicates dropped, keeping
    /// first-occurrence order.
    static TrainingSet from_points(std::span<const Complex> points) {
        TrainingSet ts;
        ts.points_.reserve(points.size());
        for (Complex s : points) {
            const Complex rep = s.imag() < 0.0 ? std::conj(s) : Complex(s.real(), std::abs(s.imag()));
            bool seen = false;
            for (Complex q : ts.points_) {
                if (q == rep) {
                    seen = true;
                    break;
                }
            }
            if (!seen) {
                ts.points_.push_back(rep);
            }
        }
        ts.selected_.assign(ts.points_.size(), false);
        return ts;
    }

    /// N points sigma_j = i * omega_j with omega log-spaced in [wmin, wmax].
    static TrainingSet log_grid(double wmin, double wmax, Index n) {
        if (!(wmin > 0.0) || !(wmax >= wmin) || n < 1) {
            throw DimensionMismatchError("log grid needs 0 < wmin <= wmax and n >= 1");
        }
        std::vector<Complex> pts;
        pts.reserve(static_cast<std::size_t>(n));
        const double lo = std::log10(wmin);
        const double hi = std::log10(wmax);
        for (Index j = 0; j < n; ++j) {
            const double t = n == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(n - 1);
            pts.emplace_back(0.0, std::pow(10.0, lo + t * (hi - lo)));
        }
        return from_points(pts);
    }

    /// N points sigma_j = i * omega_j with omega uniform in [wmin, wmax].
    static TrainingSet linear_grid(double wmin, double wmax, Index n) {
        if (!(wmax >= wmin) || n < 1) {
            throw DimensionMismatchError("linear grid needs wmin <= wmax and n >= 1");
        }
        std::vector<Complex> pts;
        pts.reserve(static_cast<std::size_t>(n));
        for (Index j = 0; j < n; ++j) {
            const double t = n == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(n - 1);
            pts.emplace_back(0.0, wmin + t * (wmax - wmin));
        }
        return from_points(pts);
    }

    Index size() const { return static_cast<Index>(points_.size()); }

    Complex point(Index j) const { return points_.at(static_cast<std::size_t>(j)); }

    const std::vector<Complex>& points() const { return points_; }

    /// True when the representative stands only for itself (no conjugate).
    bool is_real_point(Index j) const { return point(j).imag() == 0.0; }

    bool selected(Index j) const { return selected_.at(static_cast<std::size_t>(j)); }

    void mark_selected(Index j) { selected_.at(static_cast<std::size_t>(j)) = true; }

    Index num_selected() const {
        Index c = 0;
        for (bool b : selected_) {
            c += b ? 1 : 0;
        }
        return c;
    }

    Index num_unselected() const { return size() - num_selected(); }

    void clear_selection() { selected_.assign(selected_.size(), false); }

    /// Index of the unselected point with smallest |sigma|, ties to the
    /// lowest index.
    Index smallest_magnitude_unselected() const {
        Index best = -1;
        double best_mag = 0.0;
        for (Index j = 0; j < size(); ++j) {
            if (selected(j)) {
                continue;
            }
            const double mag = std::abs(point(j));
            if (best < 0 || mag < best_mag) {
                best = j;
                best_mag = mag;
            }
        }
        if (best < 0) {
            throw ExhaustedError("no unselected training points remain");
        }
        return best;
    }

private:
    std::vector<Complex> points_;
    std::vector<bool> selected_;
};

/// Full point list implied by the representatives (conjugates appended).
inline std::vector<Complex> conjugate_closure(const TrainingSet& ts) {
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(2 * ts.size()));
    for (Index j = 0; j < ts.size(); ++j) {
        out.push_back(ts.point(j));
    }
    for (Index j = 0; j < ts.size(); ++j) {
        if (!ts.is_real_point(j)) {
            out.push_back(std::conj(ts.point(j)));
        }
    }
    return out;
}

} // namespace gdrop
