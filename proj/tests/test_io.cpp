#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "gdrop/gdrop.hpp"

using namespace gdrop;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("gdrop_io_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

DenseMatrix random_dense(Index rows, Index cols, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    DenseMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            m(i, j) = dist(rng);
        }
    }
    return m;
}

} // namespace

TEST_CASE("sparse matrices survive a write and read round trip bit for bit") {
    TempDir tmp("sparse_rt");
    SparseRealMatrix m(5, 4);
    std::vector<Eigen::Triplet<double>> tri = {{0, 0, 1.0 / 3.0},
                                               {2, 1, -7.25e-9},
                                               {4, 3, 3.141592653589793},
                                               {1, 2, 1e300}};
    m.setFromTriplets(tri.begin(), tri.end());

    const std::string path = tmp.file("m.mtx");
    write_matrix_market(path, m);
    const CoeffMatrix back = read_matrix_market(path);
    REQUIRE(back.is_sparse());
    CHECK(back.rows() == 5);
    CHECK(back.cols() == 4);
    CHECK((back.to_dense() - DenseMatrix(m)).norm() == 0.0);
}

TEST_CASE("dense matrices survive a write and read round trip bit for bit") {
    TempDir tmp("dense_rt");
    const DenseMatrix m = random_dense(4, 6, 91);
    const std::string path = tmp.file("m.mtx");
    write_matrix_market(path, m);
    const CoeffMatrix back = read_matrix_market(path);
    REQUIRE(!back.is_sparse());
    CHECK(back.to_dense() == m);
}

TEST_CASE("symmetric coordinate files are mirrored on read") {
    TempDir tmp("sym_coord");
    const std::string path = tmp.file("s.mtx");
    write_text(path,
               "%%MatrixMarket matrix coordinate real symmetric\n"
               "% stiffness-like sample\n"
               "3 3 4\n"
               "1 1 2.5\n"
               "2 1 -1.0\n"
               "3 2 4.0\n"
               "3 3 1.5\n");
    const CoeffMatrix m = read_matrix_market(path);
    DenseMatrix expected(3, 3);
    expected << 2.5, -1.0, 0.0, -1.0, 0.0, 4.0, 0.0, 4.0, 1.5;
    CHECK(m.to_dense() == expected);
}

TEST_CASE("symmetric array files expand the stored lower triangle") {
    TempDir tmp("sym_array");
    const std::string path = tmp.file("s.mtx");
    write_text(path,
               "%%MatrixMarket matrix array real symmetric\n"
               "2 2\n"
               "1.0\n"
               "2.0\n"
               "3.0\n");
    const CoeffMatrix m = read_matrix_market(path);
    DenseMatrix expected(2, 2);
    expected << 1.0, 2.0, 2.0, 3.0;
    CHECK(m.to_dense() == expected);
}

TEST_CASE("integer fields parse as real values") {
    TempDir tmp("int_field");
    const std::string path = tmp.file("i.mtx");
    write_text(path,
               "%%MatrixMarket matrix coordinate integer general\n"
               "2 2 2\n"
               "1 1 3\n"
               "2 2 -4\n");
    const CoeffMatrix m = read_matrix_market(path);
    DenseMatrix expected = DenseMatrix::Zero(2, 2);
    expected(0, 0) = 3.0;
    expected(1, 1) = -4.0;
    CHECK(m.to_dense() == expected);
}

TEST_CASE("malformed matrix files are rejected with a parse error") {
    TempDir tmp("bad_mm");

    const std::string banner = tmp.file("banner.mtx");
    write_text(banner, "%%NotMatrixMarket matrix coordinate real general\n1 1 1\n1 1 1.0\n");
    CHECK_THROWS_AS(read_matrix_market(banner), ParseError);

    const std::string field = tmp.file("field.mtx");
    write_text(field, "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1.0 0.0\n");
    CHECK_THROWS_AS(read_matrix_market(field), ParseError);

    const std::string truncated = tmp.file("trunc.mtx");
    write_text(truncated, "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 1.0\n");
    CHECK_THROWS_AS(read_matrix_market(truncated), ParseError);

    const std::string range = tmp.file("range.mtx");
    write_text(range, "%%MatrixMarket matrix coordinate real general\n3 3 1\n4 1 1.0\n");
    CHECK_THROWS_AS(read_matrix_market(range), ParseError);

    CHECK_THROWS_AS(read_matrix_market(tmp.file("missing.mtx")), ParseError);

    try {
        read_matrix_market(range);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("range.mtx") != std::string::npos);
    }
}

TEST_CASE("an exported system loads back identically") {
    TempDir tmp("config_rt");
    const StructuredSystem sys = gen_fom(60, true);
    const GridSpec grid{0.5, 500.0, 24, true};
    const std::string config = export_system(tmp.path.string(), sys, grid, "fom");

    const LoadedConfig loaded = load_config(config);
    CHECK(loaded.system.order() == 60);
    CHECK(loaded.system.num_terms() == 2);
    CHECK(!loaded.galerkin_default);
    CHECK(loaded.grid.wmin == 0.5);
    CHECK(loaded.grid.wmax == 500.0);
    CHECK(loaded.grid.n == 24);
    CHECK(loaded.grid.log_spacing);

    CHECK(loaded.system.input_matrix() == sys.input_matrix());
    CHECK(loaded.system.output_matrix() == sys.output_matrix());
    for (Index i = 0; i < sys.num_terms(); ++i) {
        CHECK(loaded.system.term(i).function == sys.term(i).function);
        CHECK(loaded.system.term(i).matrix.to_dense() == sys.term(i).matrix.to_dense());
    }
    const TrainingSet probe = grid.make();
    for (Complex s : probe.points()) {
        const Complex h = eval_transfer(sys, s)(0, 0);
        const Complex hl = eval_transfer(loaded.system, s)(0, 0);
        CHECK(std::abs(hl - h) <= 1e-12 * std::abs(h));
    }

    const StructuredSystem ext = load_external(config);
    CHECK(ext.order() == 60);
}

TEST_CASE("the galerkin preference survives the config round trip") {
    TempDir tmp("config_gal");
    const StructuredSystem sys = gen_second_order(10);
    const std::string config =
        export_system(tmp.path.string(), sys, GridSpec{1e-2, 1e1, 10, true}, "chain", true);
    const LoadedConfig loaded = load_config(config);
    CHECK(loaded.galerkin_default);
    CHECK(loaded.system.num_terms() == 3);
}

TEST_CASE("benchmark configs build the named model with grid overrides") {
    TempDir tmp("config_bench");
    const std::string path = tmp.file("bench.json");
    write_text(path,
               "{\n"
               "  \"benchmark\": {\"kind\": \"fom\", \"n\": 80},\n"
               "  \"range\": [1.0, 100.0],\n"
               "  \"grid\": 17,\n"
               "  \"spacing\": \"linear\"\n"
               "}\n");
    const LoadedConfig loaded = load_config(path);
    CHECK(loaded.system.order() == 80);
    CHECK(loaded.grid.wmin == 1.0);
    CHECK(loaded.grid.wmax == 100.0);
    CHECK(loaded.grid.n == 17);
    CHECK(!loaded.grid.log_spacing);
}

TEST_CASE("identity generator references avoid matrix files") {
    TempDir tmp("config_ident");
    write_matrix_market(tmp.file("a.mtx"), DenseMatrix(2.0 * DenseMatrix::Identity(3, 3)));
    write_matrix_market(tmp.file("b.mtx"), DenseMatrix(DenseMatrix::Ones(3, 1)));
    write_matrix_market(tmp.file("c.mtx"), DenseMatrix(DenseMatrix::Ones(1, 3)));
    const std::string path = tmp.file("sys.json");
    write_text(path,
               "{\n"
               "  \"terms\": [\n"
               "    {\"matrix\": {\"generator\": \"identity\", \"n\": 3},\n"
               "     \"function\": {\"kind\": \"power\", \"exponent\": 1}},\n"
               "    {\"matrix\": \"a.mtx\", \"function\": {\"kind\": \"constant\", \"value\": 1.0}}\n"
               "  ],\n"
               "  \"b\": \"b.mtx\",\n"
               "  \"c\": \"c.mtx\",\n"
               "  \"range\": [0.1, 10.0],\n"
               "  \"grid\": 5\n"
               "}\n");
    const LoadedConfig loaded = load_config(path);
    CHECK(loaded.system.order() == 3);
    const Complex h = eval_transfer(loaded.system, Complex(0.0, 1.0))(0, 0);
    const Complex expected = 3.0 / (Complex(0.0, 1.0) + 2.0);
    CHECK(std::abs(h - expected) <= 1e-13 * std::abs(expected));
}

TEST_CASE("broken configs raise parse errors") {
    TempDir tmp("config_bad");

    CHECK_THROWS_AS(load_config(tmp.file("absent.json")), ParseError);

    const std::string not_json = tmp.file("not.json");
    write_text(not_json, "{ this is not json");
    CHECK_THROWS_AS(load_config(not_json), ParseError);

    const std::string no_terms = tmp.file("empty.json");
    write_text(no_terms, "{\"terms\": [], \"b\": \"b.mtx\", \"c\": \"c.mtx\"}");
    CHECK_THROWS_AS(load_config(no_terms), ParseError);

    const std::string bad_gen = tmp.file("gen.json");
    write_text(bad_gen,
               "{\"terms\": [{\"matrix\": {\"generator\": \"hilbert\", \"n\": 3},"
               " \"function\": {\"kind\": \"power\", \"exponent\": 1}}],"
               " \"b\": \"b.mtx\", \"c\": \"c.mtx\"}");
    CHECK_THROWS_AS(load_config(bad_gen), ParseError);
}

TEST_CASE("coefficient functions round trip through json") {
    const ScalarFunction funcs[] = {
        ScalarFunction::constant(2.5),
        ScalarFunction::power(0),
        ScalarFunction::power(3),
        ScalarFunction::exponential(-3.0),
        ScalarFunction::shifted_rational(1.05),
        ScalarFunction::scaled(-1.0, ScalarFunction::exponential(-3.0)),
        ScalarFunction::scaled(2.0, ScalarFunction::scaled(0.5, ScalarFunction::power(1))),
    };
    for (const ScalarFunction& f : funcs) {
        CHECK(function_from_json(function_to_json(f)) == f);
    }
    CHECK_THROWS_AS(function_from_json(Json{{"kind", "frobnicate"}}), ParseError);
    CHECK_THROWS_AS(function_from_json(Json{{"kind", "power"}}), ParseError);
    CHECK_THROWS_AS(function_from_json(Json::array()), ParseError);
}

TEST_CASE("run reports round trip through json without loss") {
    RunReport r;
    r.method = "gdrop";
    r.solve_count_large = 14;
    r.selected_points = {Complex(0.0, 0.1), Complex(0.0, 33.7), Complex(2.0, 0.0)};
    r.rom_order = 8;
    r.grid_omega = {0.1, 1.0, 10.0};
    r.fom_magnitude = {1.5, 2.5, 0.25};
    r.rom_magnitude = {1.5 + 1e-7, 2.5, 0.25};
    r.error = {1e-7, 0.0, 3e-9};
    r.timings = {0.25, 0.125, 0.0625};
    r.eps_history_abs = {1.0, 1e-2, 1e-5};
    r.eps_history_rel = {0.5, 5e-3, 5e-6};
    r.budget_exhausted = true;

    const nlohmann::json j = r;
    const RunReport back = j.get<RunReport>();
    CHECK(back == r);
    CHECK(j.at("method") == "gdrop");
    CHECK(j.at("timings").contains("basis_seconds"));
    CHECK(r.max_error() == 1e-7);

    const RunReport empty;
    const nlohmann::json je = empty;
    CHECK(je.get<RunReport>() == empty);
    CHECK(empty.max_error() == 0.0);
}

TEST_CASE("iteration records serialize with resolved training points") {
    const TrainingSet ts = TrainingSet::log_grid(0.1, 10.0, 4);
    IterationRecord rec;
    rec.iteration = 2;
    rec.new_points = {1, 3};
    rec.basis_cols = 6;
    rec.solve_count = 3;
    rec.mean_error = 0.125;
    rec.mean_error_rel = 0.0625;
    rec.elapsed_seconds = 1.5;

    const nlohmann::json j = iteration_to_json(rec, ts, "v");
    CHECK(j.at("side") == "v");
    CHECK(j.at("iteration") == 2);
    CHECK(j.at("basis_cols") == 6);
    CHECK(j.at("solve_count") == 3);
    CHECK(j.at("mean_error") == 0.125);
    CHECK(j.at("mean_error_rel") == 0.0625);
    REQUIRE(j.at("new_indices").size() == 2);
    CHECK(j.at("new_indices")[0] == 1);
    REQUIRE(j.at("new_points").size() == 2);
    CHECK(j.at("new_points")[0][1].get<double>() == ts.point(1).imag());
}
