#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gdrop/matrix.hpp"
#include "gdrop/sylvester.hpp"
#include "gdrop/training_set.hpp"

namespace gdrop {

struct PhaseTimings {
    double basis_seconds = 0.0;
    double svd_seconds = 0.0;
    double projection_seconds = 0.0;

    double total() const { return basis_seconds + svd_seconds + projection_seconds; }

    bool operator==(const PhaseTimings&) const = default;
};

/// Everything one reduction run reports: counts, the chosen order, the
/// error sweep over the evaluation grid, and phase timings.
struct RunReport {
    std::string method;
    Index solve_count_large = 0;
    std::vector<Complex> selected_points;
    Index rom_order = 0;
    std::vector<double> grid_omega;
    std::vector<double> fom_magnitude;
    std::vector<double> rom_magnitude;
    std::vector<double> error;
    PhaseTimings timings;
    std::vector<double> eps_history_abs;
    std::vector<double> eps_history_rel;
    bool budget_exhausted = false;

    double max_error() const {
        double m = 0.0;
        for (double e : error) {
            m = std::max(m, e);
        }
        return m;
    }

    bool operator==(const RunReport&) const = default;
};

inline nlohmann::json complex_list_to_json(const std::vector<Complex>& pts) {
    nlohmann::json arr = nlohmann::json::array();
    for (Complex s : pts) {
        arr.push_back({s.real(), s.imag()});
    }
    return arr;
}

inline std::vector<Complex> complex_list_from_json(const nlohmann::json& arr) {
    std::vector<Complex> pts;
    pts.reserve(arr.size());
    for (const auto& e : arr) {
        pts.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    }
    return pts;
}

inline void to_json(nlohmann::json& j, const PhaseTimings& t) {
    j = {{"basis_seconds", t.basis_seconds},
         {"svd_seconds", t.svd_seconds},
         {"projection_seconds", t.projection_seconds}};
}

inline void from_json(const nlohmann::json& j, PhaseTimings& t) {
    j.at("basis_seconds").get_to(t.basis_seconds);
    j.at("svd_seconds").get_to(t.svd_seconds);
    j.at("projection_seconds").get_to(t.projection_seconds);
}

inline void to_json(nlohmann::json& j, const RunReport& r) {
    j = {{"method", r.method},
         {"solve_count_large", r.solve_count_large},
         {"selected_points", complex_list_to_json(r.selected_points)},
         {"rom_order", r.rom_order},
         {"grid_omega", r.grid_omega},
         {"fom_magnitude", r.fom_magnitude},
         {"rom_magnitude", r.rom_magnitude},
         {"error", r.error},
         {"timings", r.timings},
         {"eps_history_abs", r.eps_history_abs},
         {"eps_history_rel", r.eps_history_rel},
         {"budget_exhausted", r.budget_exhausted}};
}

inline void from_json(const nlohmann::json& j, RunReport& r) {
    j.at("method").get_to(r.method);
    j.at("solve_count_large").get_to(r.solve_count_large);
    r.selected_points = complex_list_from_json(j.at("selected_points"));
    j.at("rom_order").get_to(r.rom_order);
    j.at("grid_omega").get_to(r.grid_omega);
    j.at("fom_magnitude").get_to(r.fom_magnitude);
    j.at("rom_magnitude").get_to(r.rom_magnitude);
    j.at("error").get_to(r.error);
    j.at("timings").get_to(r.timings);
    j.at("eps_history_abs").get_to(r.eps_history_abs);
    j.at("eps_history_rel").get_to(r.eps_history_rel);
    j.at("budget_exhausted").get_to(r.budget_exhausted);
}

/// One sampler iteration as a JSON-lines record.
inline nlohmann::json iteration_to_json(const IterationRecord& rec, const TrainingSet& training,
                                        const std::string& side) {
    std::vector<Complex> sigmas;
    sigmas.reserve(rec.new_points.size());
    for (Index idx : rec.new_points) {
        sigmas.push_back(training.point(idx));
    }
    return {{"side", side},
            {"iteration", rec.iteration},
            {"new_points", complex_list_to_json(sigmas)},
            {"new_indices", rec.new_points},
            {"basis_cols", rec.basis_cols},
            {"solve_count", rec.solve_count},
            {"mean_error", rec.mean_error},
            {"mean_error_rel", rec.mean_error_rel},
            {"elapsed_seconds", rec.elapsed_seconds}};
}

} // namespace gdrop
