#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gdrop/matrix_market.hpp"
#include "gdrop/models.hpp"
#include "gdrop/structured_system.hpp"

namespace gdrop {

using Json = nlohmann::json;

inline Json function_to_json(const ScalarFunction& f) {
    switch (f.kind()) {
    case ScalarFunction::Kind::constant:
        return {{"kind", "constant"}, {"value", f.real_parameter()}};
    case ScalarFunction::Kind::power:
        return {{"kind", "power"}, {"exponent", f.exponent()}};
    case ScalarFunction::Kind::exponential:
        return {{"kind", "exponential"}, {"rate", f.real_parameter()}};
    case ScalarFunction::Kind::shifted_rational:
        return {{"kind", "shifted_rational"}, {"shift", f.real_parameter()}};
    case ScalarFunction::Kind::scaled:
        return {{"kind", "scaled"},
                {"factor", f.real_parameter()},
                {"inner", function_to_json(f.inner())}};
    }
    throw Error("unreachable scalar function kind");
}

inline ScalarFunction function_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ParseError("coefficient function needs a \"kind\" field");
    }
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "constant") {
            return ScalarFunction::constant(j.at("value").get<double>());
        }
        if (kind == "power") {
            return ScalarFunction::power(j.at("exponent").get<int>());
        }
        if (kind == "exponential") {
            return ScalarFunction::exponential(j.at("rate").get<double>());
        }
        if (kind == "shifted_rational") {
            return ScalarFunction::shifted_rational(j.at("shift").get<double>());
        }
        if (kind == "scaled") {
            return ScalarFunction::scaled(j.at("factor").get<double>(),
                                          function_from_json(j.at("inner")));
        }
    } catch (const Json::exception& e) {
        throw ParseError(std::string("bad coefficient function parameters: ") + e.what());
    }
    throw ParseError("unknown coefficient function kind: " + kind);
}

/// Everything a run needs: the system, its frequency grid and whether the
/// model prefers Galerkin projection.
struct LoadedConfig {
    StructuredSystem system;
    GridSpec grid;
    bool galerkin_default = false;
};

namespace detail {

inline CoeffMatrix load_matrix_ref(const Json& ref, const std::filesystem::path& base,
                                   const std::string& what) {
    if (ref.is_string()) {
        const std::filesystem::path p = base / ref.get<std::string>();
        return read_matrix_market(p.string());
    }
    if (ref.is_object() && ref.contains("generator")) {
        const std::string gen = ref.at("generator").get<std::string>();
        if (gen == "identity") {
            return CoeffMatrix::identity(ref.at("n").get<Index>());
        }
        throw ParseError(what + ": unknown matrix generator: " + gen);
    }
    throw ParseError(what + ": matrix must be a file path or a generator reference");
}

inline GridSpec grid_from_json(const Json& j, GridSpec grid) {
    if (j.contains("range")) {
        const auto& r = j.at("range");
        if (!r.is_array() || r.size() != 2) {
            throw ParseError("\"range\" must be [wmin, wmax]");
        }
        grid.wmin = r.at(0).get<double>();
        grid.wmax = r.at(1).get<double>();
    }
    if (j.contains("grid")) {
        grid.n = j.at("grid").get<Index>();
    }
    if (j.contains("spacing")) {
        const std::string s = j.at("spacing").get<std::string>();
        if (s != "log" && s != "linear") {
            throw ParseError("\"spacing\" must be \"log\" or \"linear\"");
        }
        grid.log_spacing = s == "log";
    }
    return grid;
}

} // namespace detail

inline LoadedConfig load_config_json(const Json& doc, const std::filesystem::path& base) {
    if (doc.contains("benchmark")) {
        const Json& b = doc.at("benchmark");
        BenchmarkRequest req;
        req.kind = b.at("kind").get<std::string>();
        if (b.contains("n")) {
            req.n = b.at("n").get<Index>();
        }
        if (b.contains("grid_side")) {
            req.n = b.at("grid_side").get<Index>();
        }
        if (b.contains("tau")) {
            req.tau = b.at("tau").get<double>();
        }
        if (b.contains("gamma")) {
            req.gamma = b.at("gamma").get<double>();
        }
        if (b.contains("damping")) {
            req.damping = b.at("damping").get<double>();
        }
        if (b.contains("seed")) {
            req.seed = b.at("seed").get<unsigned>();
        }
        BenchmarkBundle bundle = make_benchmark(req);
        return {std::move(bundle.system), detail::grid_from_json(doc, bundle.grid),
                bundle.galerkin_default};
    }
    if (!doc.contains("terms") || !doc.at("terms").is_array() || doc.at("terms").empty()) {
        throw ParseError("config needs a non-empty \"terms\" array or a \"benchmark\" block");
    }
    std::vector<Term> terms;
    Index term_index = 0;
    for (const Json& t : doc.at("terms")) {
        const std::string what = "term " + std::to_string(term_index);
        if (!t.contains("matrix") || !t.contains("function")) {
            throw ParseError(what + ": needs \"matrix\" and \"function\"");
        }
        CoeffMatrix m = detail::load_matrix_ref(t.at("matrix"), base, what);
        terms.push_back({std::move(m), function_from_json(t.at("function"))});
        ++term_index;
    }
    if (!doc.contains("b") || !doc.contains("c")) {
        throw ParseError("config needs \"b\" and \"c\" matrix paths");
    }
    DenseMatrix b = detail::load_matrix_ref(doc.at("b"), base, "input matrix").to_dense();
    DenseMatrix c = detail::load_matrix_ref(doc.at("c"), base, "output matrix").to_dense();
    try {
        StructuredSystem sys(std::move(terms), std::move(b), std::move(c));
        const bool galerkin = doc.value("galerkin", false);
        return {std::move(sys), detail::grid_from_json(doc, GridSpec{}), galerkin};
    } catch (const DimensionMismatchError& e) {
        throw DimensionMismatchError(std::string("config system: ") + e.what());
    }
}

inline LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path + ": cannot open file");
    }
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return load_config_json(doc, std::filesystem::path(path).parent_path());
}

/// Write a system plus grid as Matrix Market files and a config document
/// referencing them, so the directory is itself loadable. Returns the config
/// path.
inline std::string export_system(const std::string& dir, const StructuredSystem& sys,
                                 const GridSpec& grid, const std::string& stem,
                                 bool galerkin_default = false) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    Json terms = Json::array();
    for (Index i = 0; i < sys.num_terms(); ++i) {
        const std::string name = stem + "_A" + std::to_string(i) + ".mtx";
        write_matrix_market((fs::path(dir) / name).string(), sys.term(i).matrix);
        terms.push_back({{"matrix", name}, {"function", function_to_json(sys.term(i).function)}});
    }
    const std::string b_name = stem + "_B.mtx";
    const std::string c_name = stem + "_C.mtx";
    write_matrix_market((fs::path(dir) / b_name).string(), sys.input_matrix());
    write_matrix_market((fs::path(dir) / c_name).string(), sys.output_matrix());
    Json doc;
    doc["terms"] = std::move(terms);
    doc["b"] = b_name;
    doc["c"] = c_name;
    doc["range"] = {grid.wmin, grid.wmax};
    doc["grid"] = grid.n;
    doc["spacing"] = grid.log_spacing ? "log" : "linear";
    if (galerkin_default) {
        doc["galerkin"] = true;
    }
    const std::string config_path = (fs::path(dir) / (stem + ".json")).string();
    std::ofstream out(config_path);
    if (!out) {
        throw ParseError(config_path + ": cannot open file for writing");
    }
    out << doc.dump(2) << "\n";
    if (!out) {
        throw ParseError(config_path + ": write failed");
    }
    return config_path;
}

/// models-module entry point: assemble a StructuredSystem from a config file.
inline StructuredSystem load_external(const std::string& config_path) {
    return load_config(config_path).system;
}

} // namespace gdrop
