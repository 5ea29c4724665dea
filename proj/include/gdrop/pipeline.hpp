#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gdrop/drop.hpp"
#include "gdrop/models.hpp"
#include "gdrop/report.hpp"
#include "gdrop/sylvester.hpp"

namespace gdrop {

struct ReduceOptions {
    std::string method = "gdrop";
    double tol_sample = 1e-3;
    double tol_svd = 1e-8;
    std::optional<Index> order;
    bool galerkin = false;
    Index batch = 3;
};

struct ReduceOutcome {
    RunReport report;
    RomRealization rom;
    TrainingSet training;
    std::vector<IterationRecord> iterations_v;
    std::vector<IterationRecord> iterations_w;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Fill the |H|, |H_rom| and e(s) sweep of a report. Not part of the timed
/// phases.
inline void fill_error_sweep(RunReport& report, const StructuredSystem& fom,
                             const StructuredSystem& rom, const GridSpec& grid) {
    const std::vector<Complex> eval = grid.evaluation_points(2);
    report.grid_omega.clear();
    report.fom_magnitude.clear();
    report.rom_magnitude.clear();
    report.error.clear();
    double normalization = 0.0;
    for (Complex s : eval) {
        report.grid_omega.push_back(s.imag());
        report.fom_magnitude.push_back(transfer_gain(eval_transfer(fom, s)));
        report.rom_magnitude.push_back(transfer_gain(eval_transfer(rom, s)));
        normalization = std::max(normalization, report.fom_magnitude.back());
    }
    for (std::size_t i = 0; i < eval.size(); ++i) {
        const double diff = transfer_gain(
            DenseComplexMatrix(eval_transfer(rom, eval[i]) - eval_transfer(fom, eval[i])));
        report.error.push_back(normalization > 0.0 ? diff / normalization : diff);
    }
}

} // namespace detail

/// Run one reduction (GDROP active sampling or DROP full-grid) end to end:
/// bases, dominant SVDs, projection, and an error sweep on a 2x denser
/// evaluation grid.
inline ReduceOutcome run_reduce(const StructuredSystem& sys, const GridSpec& grid,
                                const ReduceOptions& opts) {
    const TrainingSet ts = grid.make();
    PhaseTimings timings;
    auto t0 = std::chrono::steady_clock::now();

    if (opts.method == "gdrop") {
        const SylvesterProblem pv = SylvesterProblem::reachability(sys, ts);
        ActiveSampleOptions sample_opts;
        sample_opts.tol = opts.tol_sample;
        sample_opts.batch = opts.batch;
        ActiveSampleResult rv = active_sample(pv, sample_opts);

        std::optional<ActiveSampleResult> rw;
        if (!opts.galerkin) {
            const SylvesterProblem pw = SylvesterProblem::observability(sys, ts);
            ActiveSampleOptions w_opts = sample_opts;
            w_opts.initial_points = rv.basis.selected_points;
            rw = active_sample(pw, w_opts);
        }
        timings.basis_seconds = detail::seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        const LowRankProjection proj =
            dominant_svd_lowrank(sys, rv.basis, rw ? &rw->basis : nullptr, rv.evaluation_training,
                                 opts.tol_svd, opts.order,
                                 rw ? &rw->evaluation_training : nullptr);
        timings.svd_seconds = detail::seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        RomRealization rom = assemble_rom(sys, proj.v_p, proj.w_p, opts.galerkin, proj.sigma1,
                                          proj.sigma2);
        timings.projection_seconds = detail::seconds_since(t0);

        RunReport report;
        report.method = "gdrop";
        report.solve_count_large = rv.solve_count + (rw ? rw->solve_count : 0);
        for (Index idx : rv.basis.selected_points) {
            report.selected_points.push_back(rv.training.point(idx));
        }
        report.rom_order = rom.system.order();
        report.timings = timings;
        for (const IterationRecord& rec : rv.iterations) {
            report.eps_history_abs.push_back(rec.mean_error);
            report.eps_history_rel.push_back(rec.mean_error_rel);
        }
        report.budget_exhausted = rv.budget_exhausted || (rw && rw->budget_exhausted);
        detail::fill_error_sweep(report, sys, rom.system, grid);
        return {std::move(report), std::move(rom), rv.training, std::move(rv.iterations),
                rw ? std::move(rw->iterations) : std::vector<IterationRecord>{}};
    }

    if (opts.method != "drop") {
        throw ParseError("unknown method: " + opts.method + " (expected drop or gdrop)");
    }
    const SubspacePair pair = build_bases_direct(sys, ts, opts.galerkin);
    timings.basis_seconds = detail::seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const DominantSvd svds = dominant_svd_direct(sys, pair);
    timings.svd_seconds = detail::seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const Index r = choose_order(svds.horizontal.s, svds.vertical.s, opts.tol_svd, opts.order);
    RomRealization rom = project(sys, pair, svds, r);
    timings.projection_seconds = detail::seconds_since(t0);

    RunReport report;
    report.method = "drop";
    report.solve_count_large = ts.size() * (opts.galerkin ? 1 : 2);
    report.rom_order = rom.system.order();
    report.timings = timings;
    detail::fill_error_sweep(report, sys, rom.system, grid);
    return {std::move(report), std::move(rom), ts, {}, {}};
}

struct CompareOutcome {
    RunReport drop_report;
    RunReport gdrop_report;
    Index rom_order = 0;
    /// max-grid |H_gdrop - H_drop| / max-grid |H|.
    double method_agreement = 0.0;
    double speedup = 0.0;
    std::string csv;
    nlohmann::json summary;
    std::vector<Complex> gdrop_selected;
};

/// Run both methods at the same order and tabulate them side by side over
/// the shared evaluation grid.
inline CompareOutcome run_compare(const StructuredSystem& sys, const GridSpec& grid,
                                  const ReduceOptions& opts) {
    ReduceOptions drop_opts = opts;
    drop_opts.method = "drop";
    ReduceOutcome drop_out = run_reduce(sys, grid, drop_opts);

    ReduceOptions gdrop_opts = opts;
    gdrop_opts.method = "gdrop";
    gdrop_opts.order = drop_out.rom.system.order();
    ReduceOutcome gdrop_out = run_reduce(sys, grid, gdrop_opts);

    CompareOutcome out;
    out.rom_order = drop_out.rom.system.order();
    out.gdrop_selected = gdrop_out.report.selected_points;

    const std::vector<Complex> eval = grid.evaluation_points(2);
    double normalization = 0.0;
    std::vector<double> disagreement(eval.size());
    for (std::size_t i = 0; i < eval.size(); ++i) {
        normalization = std::max(normalization, drop_out.report.fom_magnitude[i]);
        disagreement[i] = transfer_gain(
            DenseComplexMatrix(eval_transfer(gdrop_out.rom.system, eval[i]) -
                               eval_transfer(drop_out.rom.system, eval[i])));
    }
    for (std::size_t i = 0; i < eval.size(); ++i) {
        const double rel = normalization > 0.0 ? disagreement[i] / normalization : disagreement[i];
        out.method_agreement = std::max(out.method_agreement, rel);
    }

    char buf[256];
    std::string csv = "omega,abs_H,abs_H_drop,abs_H_gdrop,e_drop,e_gdrop\n";
    for (std::size_t i = 0; i < eval.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      drop_out.report.grid_omega[i], drop_out.report.fom_magnitude[i],
                      drop_out.report.rom_magnitude[i], gdrop_out.report.rom_magnitude[i],
                      drop_out.report.error[i], gdrop_out.report.error[i]);
        csv += buf;
    }
    out.csv = std::move(csv);

    const double t_drop = drop_out.report.timings.total();
    const double t_gdrop = gdrop_out.report.timings.total();
    out.speedup = t_gdrop > 0.0 ? t_drop / t_gdrop : 0.0;
    out.summary = {{"rom_order", out.rom_order},
                   {"max_error_drop", drop_out.report.max_error()},
                   {"max_error_gdrop", gdrop_out.report.max_error()},
                   {"method_agreement", out.method_agreement},
                   {"time_drop_seconds", t_drop},
                   {"time_gdrop_seconds", t_gdrop},
                   {"speedup", out.speedup},
                   {"solves_drop", drop_out.report.solve_count_large},
                   {"solves_gdrop", gdrop_out.report.solve_count_large},
                   {"selected_points_gdrop", complex_list_to_json(out.gdrop_selected)}};
    out.drop_report = std::move(drop_out.report);
    out.gdrop_report = std::move(gdrop_out.report);
    return out;
}

struct SweepRow {
    Index n_points = 0;
    double t_drop = 0.0;
    double t_gdrop = 0.0;
    Index solves_drop = 0;
    Index solves_gdrop = 0;
};

/// Repeat the timed phases of both methods for several training set sizes.
inline std::vector<SweepRow> run_sweep(const StructuredSystem& sys, GridSpec grid,
                                       const std::vector<Index>& n_list,
                                       const ReduceOptions& opts) {
    std::vector<SweepRow> rows;
    rows.reserve(n_list.size());
    for (Index n : n_list) {
        grid.n = n;
        ReduceOptions drop_opts = opts;
        drop_opts.method = "drop";
        const ReduceOutcome drop_out = run_reduce(sys, grid, drop_opts);
        ReduceOptions gdrop_opts = opts;
        gdrop_opts.method = "gdrop";
        const ReduceOutcome gdrop_out = run_reduce(sys, grid, gdrop_opts);
        rows.push_back({n, drop_out.report.timings.total(), gdrop_out.report.timings.total(),
                        drop_out.report.solve_count_large, gdrop_out.report.solve_count_large});
    }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string csv = "N,t_drop,t_gdrop,solves_drop,solves_gdrop\n";
    char buf[192];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%lld,%lld\n",
                      static_cast<long long>(r.n_points), r.t_drop, r.t_gdrop,
                      static_cast<long long>(r.solves_drop),
                      static_cast<long long>(r.solves_gdrop));
        csv += buf;
    }
    return csv;
}

inline std::string selected_points_csv(const std::vector<Complex>& pts) {
    std::string csv = "omega,sigma_re,sigma_im\n";
    char buf[128];
    for (Complex s : pts) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", std::abs(s.imag()), s.real(),
                      s.imag());
        csv += buf;
    }
    return csv;
}

} // namespace gdrop
