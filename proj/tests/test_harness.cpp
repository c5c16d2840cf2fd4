#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "arhlab/elnino.hpp"
#include "arhlab/io.hpp"
#include "arhlab/mc.hpp"
#include "arhlab/smoothing.hpp"

#include <cstdio>
#include <fstream>

using namespace arhlab;

namespace {

fs::path temp_dir() {
    fs::path dir = fs::temp_directory_path() / "arhlab_harness_test";
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

OperatorMatrix diagonal_rho(const GridPtr& grid, const std::vector<double>& coefs) {
    Matrix basis = fourier_basis(grid, static_cast<int>(coefs.size()));
    OperatorMatrix rho = zero_operator(grid);
    for (std::size_t i = 0; i < coefs.size(); ++i) {
        Curve ei(grid, basis.col(static_cast<Index>(i)));
        rho = rho + coefs[i] * tensor_product(ei, ei);
    }
    return rho;
}

}  // namespace

TEST_CASE("bspline basis partitions unity and reproduces affine functions") {
    BSplineBasis basis(8);
    for (double x : {0.0, 0.17, 0.5, 0.83, 1.0}) {
        CHECK(basis.evaluate(x).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }

    // affine reproduction: fit y = 2 + 3x with zero penalty, evaluate exactly
    GridPtr g = Grid::uniform(101);
    Vector pts = Vector::LinSpaced(12, 0.0, 1.0);
    Vector vals = 2.0 + 3.0 * pts.array();
    Curve fit = smooth_to_grid(pts, vals, basis, 0.0, g);
    Vector truth = 2.0 + 3.0 * g->points().array();
    CHECK((fit.values - truth).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("penalty to infinity drives the fit to the least-squares line") {
    BSplineBasis basis(8);
    GridPtr g = Grid::uniform(101);
    Vector pts = Vector::LinSpaced(12, 0.0, 1.0);
    RngStream rng(3);
    Vector vals(12);
    for (Index i = 0; i < 12; ++i) {
        vals(i) = 1.0 + 0.5 * pts(i) + std::sin(6.0 * pts(i)) + 0.1 * rng.gaussian();
    }

    // least squares affine fit at the sample points
    Matrix design(12, 2);
    design.col(0).setOnes();
    design.col(1) = pts;
    Vector coef = (design.transpose() * design).ldlt().solve(design.transpose() * vals);
    Vector line = coef(0) + coef(1) * g->points().array();

    double previous = std::numeric_limits<double>::infinity();
    for (double pen : {1e-2, 1e-1, 1e0, 1e1}) {
        Curve fit = smooth_to_grid(pts, vals, basis, pen, g);
        const double dist = norm(Curve(g, fit.values - line));
        CHECK(dist < previous);
        previous = dist;
    }
    CHECK(norm(Curve(g, smooth_to_grid(pts, vals, basis, 1e6, g).values - line)) < 1e-3);
}

TEST_CASE("interpolate is exact at nodes and linear between") {
    GridPtr g = Grid::uniform(11);
    Curve u(g, Vector(g->points().array().square()));
    Vector at(3);
    at << 0.0, 0.55, 1.0;
    Vector out = interpolate(u, at);
    CHECK(out(0) == doctest::Approx(0.0));
    CHECK(out(2) == doctest::Approx(1.0));
    CHECK(out(1) == doctest::Approx(0.5 * (0.25 + 0.36)).epsilon(1e-12));
}

TEST_CASE("ingest: whole year, gap rejection, bad rows") {
    fs::path dir = temp_dir();

    fs::path ok = dir / "ok.csv";
    std::string content = "year,month,value\n";
    for (int m = 1; m <= 12; ++m) {
        content += "1950," + std::to_string(m) + "," + std::to_string(20.0 + m) + "\n";
    }
    write_text(ok, content);
    ScalarSeries s = ingest_monthly_csv(ok);
    CHECK(s.size() == 12);
    CHECK(s.values(0) == doctest::Approx(21.0));

    fs::path gap = dir / "gap.csv";
    std::string gap_content = "year,month,value\n";
    for (int m = 1; m <= 12; ++m) {
        if (m == 6) continue;
        gap_content += "1950," + std::to_string(m) + ",21.5\n";
    }
    write_text(gap, gap_content);
    CHECK_THROWS_WITH_AS(ingest_monthly_csv(gap), doctest::Contains(":7"), std::runtime_error);

    fs::path bad = dir / "bad.csv";
    write_text(bad, "year,month,value\n1950,1,21.0\n1950,2,oops\n");
    CHECK_THROWS_WITH_AS(ingest_monthly_csv(bad), doctest::Contains(":3"), std::runtime_error);

    // bundled stand-in spans Jan 1950 - Dec 1986: 444 rows
    fs::path bundled = fs::path(ARHLAB_SOURCE_DIR) / "data" / "elnino_synthetic.csv";
    ScalarSeries full = ingest_monthly_csv(bundled);
    CHECK(full.size() == 444);
    CHECK(full.years.front() == 1950);
    CHECK(full.years.back() == 1986);
}

TEST_CASE("series_to_curves: constants survive smoothing; none round-trips") {
    ScalarSeries s;
    for (int m = 1; m <= 12; ++m) {
        s.years.push_back(1960);
        s.months.push_back(m);
    }
    s.values = Vector::Constant(12, 4.2);

    SmoothingConfig none;
    none.kind = SmoothingConfig::Kind::None;
    auto raw = series_to_curves(s, none);
    REQUIRE(raw.size() == 1);
    CHECK((raw[0].values.array() == 4.2).all());

    SmoothingConfig pen;
    pen.kind = SmoothingConfig::Kind::PenalizedBasis;
    pen.penalty = 10.0;
    auto smooth = series_to_curves(s, pen);
    REQUIRE(smooth.size() == 1);
    CHECK((smooth[0].values.array() - 4.2).abs().maxCoeff() < 1e-8);

    // none maps the 12 points verbatim
    s.values = Vector::LinSpaced(12, 1.0, 12.0);
    auto mapped = series_to_curves(s, none);
    CHECK((mapped[0].values - s.values).cwiseAbs().maxCoeff() == 0.0);

    ScalarSeries partial = s;
    partial.years.pop_back();
    partial.months.pop_back();
    partial.values = s.values.head(11);
    CHECK_THROWS_AS(series_to_curves(partial, none), std::invalid_argument);
}

TEST_CASE("evaluate: exact, offset, degenerate denominator") {
    Vector actual = Vector::Constant(12, 10.0);
    EvalReport same = evaluate(actual, actual);
    CHECK(same.mse == 0.0);
    CHECK(same.rmae_percent == 0.0);

    Vector off = actual.array() + 1.0;
    EvalReport shifted = evaluate(off, actual);
    CHECK(shifted.mse == doctest::Approx(1.0));
    CHECK(shifted.rmae_percent == doctest::Approx(10.0));

    Vector zero_actual = Vector::Zero(12);
    CHECK_THROWS_AS(evaluate(off, zero_actual), std::invalid_argument);

    // recomputable from the stored per-point values
    double mse = 0.0, rmae = 0.0;
    for (Index i = 0; i < 12; ++i) {
        const double e = shifted.actuals(i) - shifted.predictions(i);
        mse += e * e / 12.0;
        rmae += std::abs(e) / std::abs(shifted.actuals(i)) / 12.0 * 100.0;
    }
    CHECK(mse == doctest::Approx(shifted.mse).epsilon(1e-12));
    CHECK(rmae == doctest::Approx(shifted.rmae_percent).epsilon(1e-12));
}

TEST_CASE("elnino pipeline: split hygiene and accuracy on the bundled stand-in") {
    fs::path bundled = fs::path(ARHLAB_SOURCE_DIR) / "data" / "elnino_synthetic.csv";
    ScalarSeries series = ingest_monthly_csv(bundled);

    ElninoConfig cfg;
    cfg.seed = 1;
    ElninoResult res = elnino_pipeline(series, cfg);

    // fitting consumes exactly the 36 years 1950..1985
    CHECK(res.train_years.size() == 36);
    CHECK(res.train_years.front() == 1950);
    CHECK(res.train_years.back() == 1985);

    CHECK(res.report.predictions.size() == 12);
    CHECK(res.report.predictions.allFinite());
    CHECK(res.report.mse < 1.0);

    // no-smoothing config also runs
    ElninoConfig raw_cfg = cfg;
    raw_cfg.smoothing.kind = SmoothingConfig::Kind::None;
    ElninoResult raw = elnino_pipeline(series, raw_cfg);
    CHECK(raw.report.mse < 1.0);
}

TEST_CASE("csv round trips") {
    fs::path dir = temp_dir();
    GridPtr g = Grid::uniform(17);
    NoiseSpec noise = NoiseSpec::fourier(g, 5, 2.0, 11);
    auto sample = gen_white_noise(noise, 6);

    write_sample_csv(dir / "s.csv", sample);
    auto back = read_sample_csv(dir / "s.csv");
    REQUIRE(back.size() == sample.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK((back[i].values - sample[i].values).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(back[0].grid->compatible_with(*g));

    OperatorMatrix op = diagonal_rho(g, {0.7, 0.4});
    write_operator_csv(dir / "op.csv", op);
    OperatorMatrix op_back = read_operator_csv(dir / "op.csv");
    CHECK((op_back.kernel - op.kernel).cwiseAbs().maxCoeff() == 0.0);

    // no temp residue from atomic writes
    for (const auto& entry : fs::directory_iterator(dir)) {
        CHECK(entry.path().extension() != ".tmp");
    }

    CHECK(file_hash(dir / "s.csv") == file_hash(dir / "s.csv"));
}

TEST_CASE("mc lln: iid and rank-1 closed forms at reduced scale") {
    GridPtr g = Grid::uniform(51);
    NoiseSpec noise = NoiseSpec::fourier(g, 10, 2.0, 7);

    SUBCASE("rho = 0: limit is trace Gamma_eps") {
        ArhSpec spec{zero_operator(g), noise, 0};
        McLlnReport rep = mc_lln_rate(spec, 500, 100);
        CHECK(rep.longrun == doctest::Approx(trace_of(noise.covariance())).epsilon(1e-8));
        CHECK(rep.ratio == doctest::Approx(1.0).epsilon(0.25));
        CHECK_FALSE(rep.wide_variance);
    }

    SUBCASE("rank-1 rho: geometric closed form for the limit") {
        const double b = 0.5;
        Matrix basis = fourier_basis(g, 1);
        Curve e1(g, basis.col(0));
        OperatorMatrix rho(g, b * e1.values * e1.values.transpose());
        ArhSpec spec{rho, noise, 100};
        McLlnReport rep = mc_lln_rate(spec, 500, 100);
        // longrun = trace(Gamma_0) + 2 g b/(1-b) with Gamma_0 the stationary
        // covariance and g its e1 diagonal
        OperatorMatrix gamma0 = stationary_covariance(rho, noise.covariance());
        const double gval = inner_product(apply_operator(gamma0, e1), e1);
        CHECK(rep.longrun ==
              doctest::Approx(trace_of(gamma0) + 2.0 * gval * b / (1.0 - b)).epsilon(1e-6));
        CHECK(rep.ratio == doctest::Approx(1.0).epsilon(0.30));
    }

    SUBCASE("reps = 1 raises the wide-variance flag") {
        ArhSpec spec{zero_operator(g), noise, 0};
        McLlnReport rep = mc_lln_rate(spec, 100, 1);
        CHECK(rep.wide_variance);
        CHECK(rep.standard_error == 0.0);
    }
}

TEST_CASE("jarque-bera calibration keeps its size on gaussian data") {
    const double crit = jarque_bera_critical(50, 0.01, 4000, 99);
    CHECK(crit > 0.0);
    int rejections = 0;
    const int batches = 400;
    for (int b = 0; b < batches; ++b) {
        RngStream rng(5000 + b);
        std::vector<double> sample(50);
        for (double& v : sample) v = rng.gaussian();
        if (jarque_bera(sample) > crit) ++rejections;
    }
    // nominal level 1%: the rate over 400 fresh batches stays below 3%
    CHECK(rejections <= 12);
}

TEST_CASE("mc clt targets: identity and rank-1 resolvent forms") {
    GridPtr g = Grid::uniform(51);
    NoiseSpec noise = NoiseSpec::fourier(g, 10, 2.0, 13);

    McCltReport iid = mc_mean_clt(ArhSpec{zero_operator(g), noise, 0}, 200, 4, 25, 2);
    CHECK(iid.directions[0].target == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(iid.directions[1].target == doctest::Approx(0.25).epsilon(1e-8));

    const double b = 0.5;
    McCltReport ar = mc_mean_clt(ArhSpec{diagonal_rho(g, {b}), noise, 100}, 200, 4, 25, 2);
    CHECK(ar.directions[0].target == doctest::Approx(1.0 / ((1 - b) * (1 - b))).epsilon(1e-8));
    CHECK(ar.directions[1].target == doctest::Approx(0.25).epsilon(1e-8));
}
