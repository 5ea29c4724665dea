#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gdrop/gdrop.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_path;
    std::string method = "gdrop";
    double tol_sample = 1e-3;
    double tol_svd = 1e-8;
    std::optional<gdrop::Index> order;
    std::string mode;
    gdrop::Index batch = 3;
    std::string grid;
    std::string range;
    std::optional<unsigned> seed;
    std::string out_dir;
    std::string log_json;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool with_method) {
    cmd->add_option("config", args.config_path, "Config document (JSON)")->required();
    if (with_method) {
        cmd->add_option("--method", args.method, "Reduction method")
            ->check(CLI::IsMember({"drop", "gdrop"}));
    }
    cmd->add_option("--tol-sample", args.tol_sample, "Active-sampling tolerance (relative)");
    cmd->add_option("--tol-svd", args.tol_svd, "Order-selection tail tolerance");
    cmd->add_option_function<long long>(
        "--order", [&args](long long r) { args.order = static_cast<gdrop::Index>(r); },
        "Reduced order override");
    cmd->add_option("--mode", args.mode, "Projection mode")
        ->check(CLI::IsMember({"two-sided", "galerkin"}));
    cmd->add_option("--batch", args.batch, "Points selected per sampling round");
    cmd->add_option("--grid", args.grid, "Training grid size N (comma list for sweep)");
    cmd->add_option("--range", args.range, "Frequency range wmin:wmax");
    cmd->add_option_function<unsigned>(
        "--seed", [&args](unsigned s) { args.seed = s; }, "Generator seed override");
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--log-json", args.log_json, "Iteration log path (JSON lines)");
}

std::vector<gdrop::Index> parse_grid_list(const std::string& text) {
    std::vector<gdrop::Index> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        out.push_back(static_cast<gdrop::Index>(std::stoll(item)));
    }
    if (out.empty()) {
        throw gdrop::ParseError("--grid needs at least one integer");
    }
    return out;
}

gdrop::LoadedConfig load_with_overrides(const CommonArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) {
        throw gdrop::ParseError(args.config_path + ": cannot open file");
    }
    gdrop::Json doc;
    try {
        doc = gdrop::Json::parse(in);
    } catch (const gdrop::Json::exception& e) {
        throw gdrop::ParseError(args.config_path + ": " + e.what());
    }
    if (args.seed && doc.contains("benchmark")) {
        doc["benchmark"]["seed"] = *args.seed;
    }
    gdrop::LoadedConfig cfg =
        gdrop::load_config_json(doc, fs::path(args.config_path).parent_path());
    if (!args.range.empty()) {
        const auto colon = args.range.find(':');
        if (colon == std::string::npos) {
            throw gdrop::ParseError("--range expects wmin:wmax");
        }
        cfg.grid.wmin = std::stod(args.range.substr(0, colon));
        cfg.grid.wmax = std::stod(args.range.substr(colon + 1));
    }
    if (!args.grid.empty()) {
        const auto list = parse_grid_list(args.grid);
        cfg.grid.n = list.front();
    }
    return cfg;
}

gdrop::ReduceOptions reduce_options(const CommonArgs& args, const gdrop::LoadedConfig& cfg) {
    gdrop::ReduceOptions opts;
    opts.method = args.method;
    opts.tol_sample = args.tol_sample;
    opts.tol_svd = args.tol_svd;
    opts.order = args.order;
    opts.batch = args.batch;
    opts.galerkin = args.mode.empty() ? cfg.galerkin_default : args.mode == "galerkin";
    return opts;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw gdrop::ParseError(path.string() + ": cannot open file for writing");
    }
    out << text;
    if (!out) {
        throw gdrop::ParseError(path.string() + ": write failed");
    }
}

void write_iteration_log(const fs::path& path, const gdrop::ReduceOutcome& outcome) {
    std::string text;
    for (const gdrop::IterationRecord& rec : outcome.iterations_v) {
        text += gdrop::iteration_to_json(rec, outcome.training, "v").dump() + "\n";
    }
    for (const gdrop::IterationRecord& rec : outcome.iterations_w) {
        text += gdrop::iteration_to_json(rec, outcome.training, "w").dump() + "\n";
    }
    write_text(path, text);
}

void export_rom_files(const std::string& dir, const gdrop::RomRealization& rom,
                      const gdrop::GridSpec& grid) {
    gdrop::export_system(dir, rom.system, grid, "rom", rom.galerkin);
}

int run_reduce_cmd(const CommonArgs& args, bool rom_only) {
    if (rom_only && args.out_dir.empty()) {
        throw gdrop::ParseError("export-rom needs --out DIR");
    }
    const gdrop::LoadedConfig cfg = load_with_overrides(args);
    const gdrop::ReduceOptions opts = reduce_options(args, cfg);
    const gdrop::ReduceOutcome outcome = gdrop::run_reduce(cfg.system, cfg.grid, opts);
    const gdrop::Json report_json = outcome.report;
    if (args.out_dir.empty()) {
        std::cout << report_json.dump(2) << "\n";
    } else {
        fs::create_directories(args.out_dir);
        export_rom_files(args.out_dir, outcome.rom, cfg.grid);
        if (!rom_only) {
            write_text(fs::path(args.out_dir) / "report.json", report_json.dump(2) + "\n");
            const fs::path log_path = args.log_json.empty()
                                          ? fs::path(args.out_dir) / "iterations.jsonl"
                                          : fs::path(args.log_json);
            write_iteration_log(log_path, outcome);
        }
    }
    std::cerr << "method=" << outcome.report.method << " r=" << outcome.report.rom_order
              << " order_rule=" << (args.order ? "explicit" : "tail-energy")
              << " solves=" << outcome.report.solve_count_large
              << " max_error=" << outcome.report.max_error();
    if (outcome.report.method == "gdrop") {
        std::cerr << " sampling_tol=relative";
    }
    std::cerr << "\n";
    return 0;
}

int run_compare_cmd(const CommonArgs& args) {
    const gdrop::LoadedConfig cfg = load_with_overrides(args);
    gdrop::ReduceOptions opts = reduce_options(args, cfg);
    const gdrop::CompareOutcome outcome = gdrop::run_compare(cfg.system, cfg.grid, opts);
    if (args.out_dir.empty()) {
        std::cout << outcome.summary.dump(2) << "\n";
    } else {
        fs::create_directories(args.out_dir);
        write_text(fs::path(args.out_dir) / "compare.csv", outcome.csv);
        write_text(fs::path(args.out_dir) / "summary.json", outcome.summary.dump(2) + "\n");
        write_text(fs::path(args.out_dir) / "selected_gdrop.csv",
                   gdrop::selected_points_csv(outcome.gdrop_selected));
        write_text(fs::path(args.out_dir) / "drop_report.json",
                   gdrop::Json(outcome.drop_report).dump(2) + "\n");
        write_text(fs::path(args.out_dir) / "gdrop_report.json",
                   gdrop::Json(outcome.gdrop_report).dump(2) + "\n");
    }
    std::cerr << "r=" << outcome.rom_order
              << " order_rule=" << (args.order ? "explicit" : "tail-energy")
              << " agreement=" << outcome.method_agreement << " speedup=" << outcome.speedup
              << " sampling_tol=relative\n";
    return 0;
}

int run_sweep_cmd(const CommonArgs& args) {
    const gdrop::LoadedConfig cfg = load_with_overrides(args);
    const gdrop::ReduceOptions opts = reduce_options(args, cfg);
    const std::vector<gdrop::Index> n_list =
        args.grid.empty() ? std::vector<gdrop::Index>{cfg.grid.n} : parse_grid_list(args.grid);
    const std::vector<gdrop::SweepRow> rows = gdrop::run_sweep(cfg.system, cfg.grid, n_list, opts);
    const std::string csv = gdrop::sweep_csv(rows);
    if (args.out_dir.empty()) {
        std::cout << csv;
    } else {
        fs::create_directories(args.out_dir);
        write_text(fs::path(args.out_dir) / "sweep.csv", csv);
    }
    return 0;
}

struct GenArgs {
    std::string benchmark = "fom";
    gdrop::Index n = 0;
    double tau = 3.0;
    double gamma = 1.05;
    double damping = 1e-6;
    unsigned seed = 42;
    std::string range;
    gdrop::Index grid_n = 0;
    std::string out_dir;
};

int run_gen_cmd(const GenArgs& args) {
    gdrop::BenchmarkRequest req;
    req.kind = args.benchmark;
    req.n = args.n;
    req.tau = args.tau;
    req.gamma = args.gamma;
    req.damping = args.damping;
    req.seed = args.seed;
    gdrop::BenchmarkBundle bundle = gdrop::make_benchmark(req);
    if (!args.range.empty()) {
        const auto colon = args.range.find(':');
        if (colon == std::string::npos) {
            throw gdrop::ParseError("--range expects wmin:wmax");
        }
        bundle.grid.wmin = std::stod(args.range.substr(0, colon));
        bundle.grid.wmax = std::stod(args.range.substr(colon + 1));
    }
    if (args.grid_n > 0) {
        bundle.grid.n = args.grid_n;
    }
    if (args.out_dir.empty()) {
        throw gdrop::ParseError("gen needs --out DIR");
    }
    const std::string config = gdrop::export_system(args.out_dir, bundle.system, bundle.grid,
                                                    args.benchmark, bundle.galerkin_default);
    std::cerr << "wrote " << config << " (n=" << bundle.system.order() << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structured model reduction by dominant subspace projection"};
    app.require_subcommand(1);

    CommonArgs reduce_args;
    CLI::App* reduce = app.add_subcommand("reduce", "Build one ROM and report errors");
    add_common_flags(reduce, reduce_args, true);

    CommonArgs compare_args;
    CLI::App* compare = app.add_subcommand("compare", "Run both methods at matched order");
    add_common_flags(compare, compare_args, false);

    CommonArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "Time both methods over training sizes");
    add_common_flags(sweep, sweep_args, false);

    CommonArgs export_args;
    CLI::App* export_rom = app.add_subcommand("export-rom", "Build a ROM and write it as a config");
    add_common_flags(export_rom, export_args, true);

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "Write a benchmark system to files");
    gen->add_option("--benchmark", gen_args.benchmark, "Benchmark kind")
        ->check(CLI::IsMember({"fom", "delay-rod", "fading-memory", "second-order"}));
    gen->add_option("--n", gen_args.n, "Size (order, dof count, or grid side)");
    gen->add_option("--tau", gen_args.tau, "Delay constant");
    gen->add_option("--gamma", gen_args.gamma, "Fading-memory shift");
    gen->add_option("--damping", gen_args.damping, "Proportional damping factor");
    gen->add_option("--seed", gen_args.seed, "Random sign seed");
    gen->add_option("--range", gen_args.range, "Frequency range wmin:wmax");
    gen->add_option("--grid", gen_args.grid_n, "Training grid size N");
    gen->add_option("--out", gen_args.out_dir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (reduce->parsed()) {
            return run_reduce_cmd(reduce_args, false);
        }
        if (compare->parsed()) {
            return run_compare_cmd(compare_args);
        }
        if (sweep->parsed()) {
            return run_sweep_cmd(sweep_args);
        }
        if (export_rom->parsed()) {
            return run_reduce_cmd(export_args, true);
        }
        if (gen->parsed()) {
            return run_gen_cmd(gen_args);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
