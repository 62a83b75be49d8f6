#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "covshift/error.hpp"
#include "covshift/harness.hpp"
#include "covshift/lpr.hpp"
#include "covshift/rates.hpp"

using namespace covshift;

namespace {

ExperimentSpec small_manifold(int reps = 5) {
    ExperimentSpec s;
    s.name = "small";
    s.generator.kind = GeneratorKind::Manifold;
    s.generator.d = 2;
    s.x_star = manifold_point();
    s.generator.anchor = s.x_star;
    s.d_for_oracle = 2;
    s.sweep = {{500, 300, 0.0}, {500, 600, 0.0}, {500, 1200, 0.0}};
    s.estimators = {EstimatorKind::PooledOracle, EstimatorKind::TargetOnlyOracle};
    s.replications = reps;
    s.base_seed = 77;
    return s;
}

}  // namespace

TEST_CASE("slope of an exact power law") {
    std::vector<std::pair<double, double>> pts;
    for (double n : {100.0, 1000.0, 5000.0, 20000.0}) pts.emplace_back(n, 3.0 * std::pow(n, -0.7));
    const SlopeFit f = fit_slope(pts);
    CHECK(f.slope == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(f.stderr_slope < 1e-10);
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK_THROWS_AS(fit_slope({{1.0, 1.0}, {2.0, 1.0}}), InputError);
    CHECK_THROWS_AS(fit_slope({{1.0, 1.0}, {2.0, 0.0}, {3.0, 1.0}}), InputError);
}

TEST_CASE("slope standard error against a hand computation") {
    // log-log points (0, 0), (1, -1), (2, -1.5): slope -0.75, residuals 1/12, -1/6, 1/12
    const double e = std::exp(1.0);
    const SlopeFit f = fit_slope({{1.0, 1.0}, {e, std::exp(-1.0)}, {e * e, std::exp(-1.5)}});
    CHECK(f.slope == doctest::Approx(-0.75));
    const double rss = 1.0 / 144 + 1.0 / 36 + 1.0 / 144;
    CHECK(f.stderr_slope == doctest::Approx(std::sqrt(rss / 1.0 / 2.0)));
}

TEST_CASE("oracle bandwidths follow the recipes") {
    ExperimentSpec s = small_manifold();
    const auto b = oracle_bandwidths(s, {5000, 1000, 0.0});
    CHECK(b.pooled == doctest::Approx(0.35569).epsilon(1e-5));
    CHECK(b.target_only == doctest::Approx(std::pow(1000.0, -1.0 / 7)));

    ExperimentSpec sd;
    sd.generator.kind = GeneratorKind::SameDim;
    sd.x_star = interior_point();
    sd.generator.anchor = sd.x_star;
    sd.estimators = {EstimatorKind::PooledOracle};
    const auto inner = oracle_bandwidths(sd, {300, 700, 0.0});
    CHECK(inner.pooled == doctest::Approx(std::pow(1000.0, -0.1)));
    CHECK(inner.target_only == doctest::Approx(std::pow(700.0, -0.1)));
    sd.x_star = exterior_point();
    const auto outer = oracle_bandwidths(sd, {300, 700, 0.0});
    CHECK(outer.target_only == 0.0);
    CHECK(outer.pooled == doctest::Approx(std::pow(300.0, -0.1)));
}

TEST_CASE("experiment output is reproducible and matches direct fits") {
    const ExperimentSpec s = small_manifold(4);
    const McResult a = run_experiment(s);
    const McResult b = run_experiment(s);
    REQUIRE(a.cells.size() == 6);
    for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells[i].squared_errors == b.cells[i].squared_errors);

    // replication 2 of the second point, refit by hand
    GeneratorSpec g = s.generator;
    g.n_p = 500;
    g.n_q = 600;
    g.seed = s.base_seed + 2;
    const SampleSet data = generate(g);
    LprConfig cfg;
    cfg.bandwidth = oracle_bandwidths(s, s.sweep[1]).pooled;
    cfg.degree = 2;
    cfg.solve = SolveMode::MinNorm;
    const double v = lpr_fit(data, s.x_star, cfg).value;
    CHECK(a.cell(EstimatorKind::PooledOracle, 500, 600).squared_errors[2] == doctest::Approx(v * v).epsilon(1e-12));

    for (const auto& c : a.cells) {
        CHECK(c.mse >= 0.0);
        CHECK(c.q25 <= c.median);
        CHECK(c.median <= c.q75);
        CHECK(c.replications == 4);
    }
    CHECK(a.slopes.size() == 2);
    CHECK_THROWS_AS(a.cell(EstimatorKind::PooledAdaptive, 500, 600), InputError);
}

TEST_CASE("failures are counted, not fatal") {
    ExperimentSpec s;
    s.generator.kind = GeneratorKind::SameDim;
    s.x_star = exterior_point();
    s.generator.anchor = s.x_star;
    s.sweep = {{0, 200, 0.0}};
    s.estimators = {EstimatorKind::PooledOracle, EstimatorKind::TargetOnlyOracle};
    s.replications = 3;
    const McResult r = run_experiment(s);
    for (const auto& c : r.cells) {
        CHECK(c.n_failures == 3);
        CHECK(c.squared_errors.size() == 3);
    }
}

TEST_CASE("results CSV") {
    McResult empty;
    empty.experiment = "none";
    std::stringstream e;
    write_results_csv(e, empty);
    CHECK(e.str() == "experiment,estimator,n_P,n_Q,rho,mse,se,median,q25,q75,n_failures\n");
    CHECK(read_results_csv(e).empty());

    const McResult r = run_experiment(small_manifold(3));
    std::stringstream buf;
    write_results_csv(buf, r);
    const auto back = read_results_csv(buf);
    REQUIRE(back.size() == r.cells.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].estimator == r.cells[i].estimator);
        CHECK(back[i].point.n_q == r.cells[i].point.n_q);
        CHECK(back[i].mse == r.cells[i].mse);
        CHECK(back[i].q75 == r.cells[i].q75);
        CHECK(back[i].n_failures == r.cells[i].n_failures);
    }
    std::stringstream bad("experiment,estimator\nx,pooled_oracle,1\n");
    CHECK_THROWS_AS(read_results_csv(bad), DataError);
}

TEST_CASE("emitted files record the seed and the spec") {
    const ExperimentSpec s = small_manifold(2);
    const McResult r = run_experiment(s);
    const auto dir = std::filesystem::temp_directory_path() / "covshift_emit_test";
    std::filesystem::remove_all(dir);
    const auto files = emit_results(r, s, dir.string());
    REQUIRE(files.size() == 2);
    std::ifstream in(files[1]);
    const auto j = nlohmann::json::parse(in);
    CHECK(j["base_seed"] == 77);
    CHECK(j["spec"]["name"] == "small");
    CHECK(j["cells"].size() == 6);
    CHECK(std::filesystem::exists(files[0]));
    std::filesystem::remove_all(dir);
}

TEST_CASE("spec validation") {
    ExperimentSpec s = small_manifold();
    s.replications = 0;
    CHECK_THROWS_AS(s.validate(), InputError);
    s = small_manifold();
    s.estimators.clear();
    CHECK_THROWS_AS(s.validate(), InputError);
    s = small_manifold();
    s.sweep.push_back({0, 0, 0.0});
    CHECK_THROWS_AS(s.validate(), InputError);
    s = small_manifold();
    s.sweep.push_back({10, 10, 0.1});
    CHECK_THROWS_AS(s.validate(), InputError);
    s.generator.kind = GeneratorKind::ApproxManifold;
    CHECK_NOTHROW(s.validate());
    s.x_star.pop_back();
    CHECK_THROWS_AS(s.validate(), InputError);
    CHECK_THROWS_AS(parse_estimator_kind("magic"), InputError);
}
