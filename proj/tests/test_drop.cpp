#include <doctest.h>

#include <random>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "gdrop/gdrop.hpp"

using namespace gdrop;

namespace {

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

DenseMatrix orthonormal_cols(Index rows, Index cols, unsigned seed) {
    const Eigen::HouseholderQR<DenseMatrix> qr(random_dense(rows, cols, seed));
    return qr.householderQ() * DenseMatrix::Identity(rows, cols);
}

DenseComplexMatrix random_complex(Index rows, Index cols, unsigned seed) {
    return random_dense(rows, cols, seed).cast<Complex>() +
           Complex(0.0, 1.0) * random_dense(rows, cols, seed + 1000).cast<Complex>();
}

StructuredSystem make_three_term_system(Index n, unsigned seed, Index m = 1, Index p = 1) {
    DenseMatrix a = DenseMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        a(i, i) = -2.0 - 0.1 * static_cast<double>(i);
        if (i > 0) {
            a(i, i - 1) = 1.0;
            a(i - 1, i) = 1.0;
        }
    }
    const DenseMatrix r = random_dense(n, n, seed + 7);
    const DenseMatrix a2 = 0.02 * (r + r.transpose());
    std::vector<Term> terms;
    terms.push_back({CoeffMatrix::identity(n), ScalarFunction::power(1)});
    terms.push_back({CoeffMatrix(a), ScalarFunction::constant(-1.0)});
    terms.push_back({CoeffMatrix(a2), ScalarFunction::shifted_rational(1.05)});
    return {std::move(terms), random_dense(n, m, seed), random_dense(p, n, seed + 1)};
}

DenseMatrix thin_q(const DenseMatrix& m) {
    const Eigen::HouseholderQR<DenseMatrix> qr(m);
    return qr.householderQ() * DenseMatrix::Identity(m.rows(), m.cols());
}

} // namespace

TEST_CASE("direct bases solve the shifted systems they claim to solve") {
    const StructuredSystem sys = make_three_term_system(16, 71);
    const TrainingSet ts = TrainingSet::log_grid(0.1, 50.0, 4);
    const SubspacePair pair = build_bases_direct(sys, ts);
    REQUIRE(pair.v.cols() == 2 * ts.size());
    REQUIRE(pair.w.cols() == 2 * ts.size());

    for (Index j = 0; j < ts.size(); ++j) {
        const Complex sigma = ts.point(j);
        const DenseComplexMatrix col_v =
            pair.v.col(2 * j).cast<Complex>() + Complex(0.0, 1.0) * pair.v.col(2 * j + 1).cast<Complex>();
        const KMatrix kv = eval_K(sys, sigma);
        const DenseComplexMatrix k =
            std::holds_alternative<DenseComplexMatrix>(kv) ? std::get<DenseComplexMatrix>(kv)
                                                           : DenseComplexMatrix(std::get<SparseComplexMatrix>(kv));
        CHECK((k * col_v - sys.input_matrix().cast<Complex>()).norm() <=
              1e-10 * sys.input_matrix().norm());

        const DenseComplexMatrix col_w =
            pair.w.col(2 * j).cast<Complex>() + Complex(0.0, 1.0) * pair.w.col(2 * j + 1).cast<Complex>();
        CHECK((k.transpose() * col_w - sys.output_matrix().transpose().cast<Complex>()).norm() <=
              1e-10 * sys.output_matrix().norm());
    }

    const SubspacePair gal = build_bases_direct(sys, ts, true);
    CHECK(gal.w.size() == 0);
    CHECK(&gal.w_effective() == &gal.v);
}

TEST_CASE("dominant svd traces match a second implementation") {
    const StructuredSystem sys = make_three_term_system(14, 72, 2, 2);
    const TrainingSet ts = TrainingSet::log_grid(0.1, 10.0, 3);
    const SubspacePair pair = build_bases_direct(sys, ts);
    const DominantSvd svds = dominant_svd_direct(sys, pair);

    const Index nv = pair.v.cols();
    const Index nw = pair.w.cols();
    const Index l = sys.num_terms();
    DenseMatrix mh(nw, l * nv);
    DenseMatrix mv(l * nw, nv);
    for (Index i = 0; i < l; ++i) {
        const DenseMatrix g = pair.w.transpose() * sys.term(i).matrix.to_dense() * pair.v;
        mh.middleCols(i * nv, nv) = g;
        mv.middleRows(i * nw, nw) = g;
    }
    const Eigen::JacobiSVD<DenseMatrix> ref_h(mh);
    const Eigen::JacobiSVD<DenseMatrix> ref_v(mv);
    CHECK((svds.horizontal.s - ref_h.singularValues()).norm() <=
          1e-10 * ref_h.singularValues().norm());
    CHECK((svds.vertical.s - ref_v.singularValues()).norm() <=
          1e-10 * ref_v.singularValues().norm());
}

TEST_CASE("identity term with shared orthonormal bases gives unit traces") {
    const Index n = 10;
    std::vector<Term> terms;
    terms.push_back({CoeffMatrix::identity(n), ScalarFunction::constant(1.0)});
    const StructuredSystem sys(std::move(terms), DenseMatrix::Ones(n, 1), DenseMatrix::Ones(1, n));
    SubspacePair pair;
    pair.v = orthonormal_cols(n, 4, 73);
    pair.w = pair.v;
    const DominantSvd svds = dominant_svd_direct(sys, pair);
    CHECK((svds.horizontal.s - Vector::Ones(4)).norm() < 1e-13);
    CHECK((svds.vertical.s - Vector::Ones(4)).norm() < 1e-13);
}

TEST_CASE("duplicated training columns add no rank") {
    const StructuredSystem sys = make_three_term_system(12, 74);
    const Complex sigma(0.0, 2.0);
    const DenseComplexMatrix xv = shifted_solve(sys, sigma, sys.input_matrix(), false);
    const DenseComplexMatrix xw =
        shifted_solve(sys, sigma, sys.output_matrix().transpose(), true);
    SubspacePair pair;
    pair.v.resize(12, 4);
    pair.v << xv.real(), xv.imag(), xv.real(), xv.imag();
    pair.w.resize(12, 4);
    pair.w << xw.real(), xw.imag(), xw.real(), xw.imag();
    const DominantSvd svds = dominant_svd_direct(sys, pair);
    CHECK(svds.horizontal.s(2) <= 1e-12 * svds.horizontal.s(0));
    CHECK(svds.horizontal.s(3) <= 1e-12 * svds.horizontal.s(0));
    CHECK(svds.vertical.s(2) <= 1e-12 * svds.vertical.s(0));
    CHECK(svds.vertical.s(3) <= 1e-12 * svds.vertical.s(0));
}

TEST_CASE("order selection keeps the head that carries the trace mass") {
    Vector s1(3);
    s1 << 10.0, 1.0, 1e-9;
    Vector s2 = s1;
    CHECK(choose_order(s1, s2, 1e-3) == 2);
    CHECK(choose_order(s1, s2, 0.5) == 1);
    CHECK(choose_order(s1, s2, 1e-15) == 3);
    CHECK(choose_order(s1, s2, 1e-3, 100) == 3);
    CHECK(choose_order(s1, s2, 1e-3, 2) == 2);
    CHECK(choose_order(s1, s2, 1e-3, 0) == 0);

    Vector shorter(2);
    shorter << 10.0, 1.0;
    CHECK(choose_order(s1, shorter, 1e-15) == 2);

    const Vector zeros = Vector::Zero(3);
    CHECK(choose_order(zeros, zeros, 1e-3) == 0);
}

TEST_CASE("untruncated two-sided projection matches value and slope at the points") {
    const StructuredSystem sys = make_three_term_system(30, 75);
    const std::vector<Complex> pts = {Complex(0.0, 0.5), Complex(0.0, 2.0), Complex(0.0, 10.0),
                                      Complex(3.0, 0.0), Complex(0.0, 50.0)};
    const TrainingSet ts = TrainingSet::from_points(pts);
    const SubspacePair pair = build_bases_direct(sys, ts);
    const DominantSvd svds = dominant_svd_direct(sys, pair);

    Index r = 0;
    for (Index i = 0; i < svds.horizontal.s.size(); ++i) {
        if (svds.horizontal.s(i) > 1e-13 * svds.horizontal.s(0) &&
            i < svds.vertical.s.size() && svds.vertical.s(i) > 1e-13 * svds.vertical.s(0)) {
            ++r;
        }
    }
    const RomRealization rom = project(sys, pair, svds, r);

    for (Complex sigma : pts) {
        const Complex h = eval_transfer(sys, sigma)(0, 0);
        const Complex hr = eval_transfer(rom.system, sigma)(0, 0);
        CHECK(std::abs(hr - h) <= 1e-6 * std::abs(h));

        const double step = 1e-6 * std::abs(sigma);
        const Complex dh = (eval_transfer(sys, sigma + step)(0, 0) -
                            eval_transfer(sys, sigma - step)(0, 0)) /
                           (2.0 * step);
        const Complex dhr = (eval_transfer(rom.system, sigma + step)(0, 0) -
                             eval_transfer(rom.system, sigma - step)(0, 0)) /
                            (2.0 * step);
        CHECK(std::abs(dhr - dh) <= 1e-6 * std::abs(dh));
    }
}

TEST_CASE("assembled reduced system keeps the scalar functions and shapes") {
    const StructuredSystem sys = make_three_term_system(20, 76, 2, 3);
    const TrainingSet ts = TrainingSet::log_grid(0.1, 10.0, 3);
    const SubspacePair pair = build_bases_direct(sys, ts);
    const DominantSvd svds = dominant_svd_direct(sys, pair);
    const RomRealization rom = project(sys, pair, svds, 4);

    REQUIRE(rom.system.order() == 4);
    CHECK(rom.system.num_inputs() == 2);
    CHECK(rom.system.num_outputs() == 3);
    CHECK(rom.sigma1.size() == 4);
    CHECK(rom.sigma2.size() == 4);
    CHECK(!rom.galerkin);
    for (Index i = 0; i < sys.num_terms(); ++i) {
        CHECK(rom.system.term(i).function == sys.term(i).function);
        const DenseMatrix expected =
            rom.w_p.transpose() * sys.term(i).matrix.to_dense() * rom.v_p;
        CHECK((rom.system.term(i).matrix.to_dense() - expected).norm() <= 1e-13 * expected.norm());
    }
    CHECK((rom.system.input_matrix() - rom.w_p.transpose() * sys.input_matrix()).norm() <= 1e-13);
    CHECK((rom.system.output_matrix() - sys.output_matrix() * rom.v_p).norm() <= 1e-13);

    const SubspacePair gal = build_bases_direct(sys, ts, true);
    const DominantSvd gal_svds = dominant_svd_direct(sys, gal);
    const RomRealization grom = project(sys, gal, gal_svds, 3);
    CHECK(grom.galerkin);
    CHECK(grom.w_p == grom.v_p);
}

TEST_CASE("factored dominant projection reproduces the direct one") {
    const Index n = 30;
    const Index n_points = 5;
    const StructuredSystem sys = make_three_term_system(n, 77, 2, 1);
    const TrainingSet ts = TrainingSet::log_grid(0.1, 100.0, n_points);
    const Index wv = sys.num_inputs();
    const Index ww = sys.num_outputs();

    const SylvesterProblem pv = SylvesterProblem::reachability(sys, ts);
    const SylvesterProblem pw = SylvesterProblem::observability(sys, ts);
    LowRankBasis bv = make_empty_basis(pv);
    bv.s = orthonormal_cols(n, 6, 78);
    update_cached_products(pv, bv, bv.s);
    bv.z = random_complex(6, n_points * wv, 79);
    LowRankBasis bw = make_empty_basis(pw);
    bw.s = orthonormal_cols(n, 5, 80);
    update_cached_products(pw, bw, bw.s);
    bw.z = random_complex(5, n_points * ww, 81);

    SubspacePair pair;
    pair.v = bv.s * realify_coefficients(bv.z, ts, wv);
    pair.w = bw.s * realify_coefficients(bw.z, ts, ww);
    const DominantSvd direct = dominant_svd_direct(sys, pair);

    const LowRankProjection fact = dominant_svd_lowrank(sys, bv, &bw, ts, 1e-14);
    REQUIRE(fact.r >= 3);

    CHECK((fact.sigma1 - direct.horizontal.s.head(fact.r)).norm() <=
          1e-10 * direct.horizontal.s.norm());
    CHECK((fact.sigma2 - direct.vertical.s.head(fact.r)).norm() <=
          1e-10 * direct.vertical.s.norm());

    const RomRealization direct_rom = project(sys, pair, direct, fact.r);
    for (Index r = 1; r <= fact.r; ++r) {
        const Vector av = principal_angles(thin_q(direct_rom.v_p.leftCols(r)),
                                           thin_q(fact.v_p.leftCols(r)));
        const Vector aw = principal_angles(thin_q(direct_rom.w_p.leftCols(r)),
                                           thin_q(fact.w_p.leftCols(r)));
        CHECK(av.maxCoeff() <= 1e-8);
        CHECK(aw.maxCoeff() <= 1e-8);
    }
}

TEST_CASE("factored projection in galerkin mode ties both sides to V") {
    const Index n = 24;
    const Index n_points = 4;
    const StructuredSystem sys = make_three_term_system(n, 82);
    const TrainingSet ts = TrainingSet::log_grid(0.5, 20.0, n_points);

    const SylvesterProblem pv = SylvesterProblem::reachability(sys, ts);
    LowRankBasis bv = make_empty_basis(pv);
    bv.s = orthonormal_cols(n, 5, 83);
    update_cached_products(pv, bv, bv.s);
    bv.z = random_complex(5, n_points, 84);

    const LowRankProjection fact = dominant_svd_lowrank(sys, bv, nullptr, ts, 1e-14);
    CHECK(fact.w_p == fact.v_p);

    SubspacePair pair;
    pair.v = bv.s * realify_coefficients(bv.z, ts, 1);
    pair.galerkin = true;
    const DominantSvd direct = dominant_svd_direct(sys, pair);
    CHECK((fact.sigma1 - direct.horizontal.s.head(fact.r)).norm() <=
          1e-10 * direct.horizontal.s.norm());
    CHECK((fact.sigma2 - direct.vertical.s.head(fact.r)).norm() <=
          1e-10 * direct.vertical.s.norm());

    LowRankBasis broken = bv;
    broken.z = random_complex(5, n_points + 1, 85);
    CHECK_THROWS_AS(dominant_svd_lowrank(sys, broken, nullptr, ts, 1e-14),
                    DimensionMismatchError);
}

TEST_CASE("transfer error metric vanishes on identical systems") {
    const StructuredSystem sys = make_three_term_system(10, 86);
    std::vector<Complex> grid;
    for (double w : {0.1, 1.0, 10.0}) {
        grid.push_back(Complex(0.0, w));
    }
    const TransferErrorMetric metric = rom_error_metric(sys, sys, grid);
    CHECK(metric.max_error == 0.0);
    REQUIRE(metric.pointwise.size() == 3);
    CHECK(metric.normalization > 0.0);
}

TEST_CASE("transfer error metric normalizes by the peak gain") {
    std::vector<Term> terms_a;
    terms_a.push_back({CoeffMatrix::identity(1), ScalarFunction::power(1)});
    terms_a.push_back({CoeffMatrix(DenseMatrix::Constant(1, 1, -1.0)),
                       ScalarFunction::constant(-1.0)});
    const StructuredSystem fom(std::move(terms_a), DenseMatrix::Ones(1, 1),
                               DenseMatrix::Ones(1, 1));
    std::vector<Term> terms_b;
    terms_b.push_back({CoeffMatrix::identity(1), ScalarFunction::power(1)});
    terms_b.push_back({CoeffMatrix(DenseMatrix::Constant(1, 1, -1.2)),
                       ScalarFunction::constant(-1.0)});
    const StructuredSystem rom(std::move(terms_b), DenseMatrix::Ones(1, 1),
                               DenseMatrix::Ones(1, 1));

    std::vector<Complex> grid = {Complex(0.0, 0.5), Complex(0.0, 1.0), Complex(0.0, 4.0)};
    const TransferErrorMetric metric = rom_error_metric(fom, rom, grid);

    double normalization = 0.0;
    std::vector<double> expected_abs;
    for (Complex s : grid) {
        const Complex h = 1.0 / (s + 1.0);
        const Complex hr = 1.0 / (s + 1.2);
        expected_abs.push_back(std::abs(hr - h));
        normalization = std::max(normalization, std::abs(h));
    }
    REQUIRE(metric.pointwise.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(metric.pointwise[i] ==
              doctest::Approx(expected_abs[i] / normalization).epsilon(1e-12));
    }
}

TEST_CASE("first trace of the benchmark model decays by many orders") {
    const StructuredSystem sys = gen_fom(100, true);
    const TrainingSet ts = TrainingSet::log_grid(0.1, 1000.0, 30);
    const SubspacePair pair = build_bases_direct(sys, ts);
    const DominantSvd svds = dominant_svd_direct(sys, pair);
    REQUIRE(svds.horizontal.s.size() >= 40);
    CHECK(svds.horizontal.s(39) <= 1e-8 * svds.horizontal.s(0));
}
