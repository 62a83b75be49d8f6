#include <cmath>

#include "doctest.h"

#include "covshift/error.hpp"
#include "covshift/synth.hpp"

using namespace covshift;

namespace {

GeneratorSpec spec(GeneratorKind kind, std::size_t n_p, std::size_t n_q, std::uint64_t seed = 1) {
    GeneratorSpec g;
    g.kind = kind;
    g.d = kind == GeneratorKind::SameDim ? 5 : 2;
    g.n_p = n_p;
    g.n_q = n_q;
    g.anchor = kind == GeneratorKind::SameDim ? interior_point() : manifold_point();
    g.seed = seed;
    return g;
}

bool identical(const SampleSet& a, const SampleSet& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.y(i) != b.y(i) || a.origin(i) != b.origin(i)) return false;
        for (std::size_t j = 0; j < a.ambient_dim(); ++j)
            if (a.x(i)[j] != b.x(i)[j]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("regression function") {
    const std::vector<double> a{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK(f_star(a, a, 2.5) == 0.0);
    CHECK(f_star(std::vector<double>{1.5}, std::vector<double>{0.5}, 3.7) == 1.0);
    std::vector<double> x(a);
    for (auto& v : x) v += 0.1;
    CHECK(f_star(x, a, 2.5) == doctest::Approx(0.015811).epsilon(1e-4));
    CHECK(f_star(x, a, 2.5) == doctest::Approx(5.0 * std::pow(0.1, 2.5)).epsilon(1e-12));
    CHECK_THROWS_AS(f_star(std::vector<double>{1.0}, a, 2.0), InputError);
}

TEST_CASE("surface embedding") {
    const auto p = manifold_point();
    const std::vector<double> want{0.2876, 0.7883, 0.1805, 0.3325, 0.2267};
    for (std::size_t j = 0; j < 5; ++j) CHECK(p[j] == doctest::Approx(want[j]).epsilon(1e-4));
    const QuadraticSurfaceEmbedding e;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const auto x = e(std::vector<double>{-1.0 + 0.1 * i, -1.0 + 0.1 * j});
            for (double v : x) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0 + 1e-15);
            }
        }
}

TEST_CASE("same-dimension generator") {
    const auto g = spec(GeneratorKind::SameDim, 4000, 3000);
    const SampleSet s = generate(g);
    CHECK(s.n_source() == 4000);
    CHECK(s.n_target() == 3000);
    std::vector<double> mean(5, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& sup = s.origin(i) == Origin::Source ? g.source_support : g.target_support;
        CHECK(sup.contains(s.x(i)));
        if (s.origin(i) == Origin::Source)
            for (std::size_t j = 0; j < 5; ++j) mean[j] += s.x(i)[j] / 4000.0;
    }
    const double sd = std::sqrt(1.0 / 12.0 / 4000.0);
    for (double m : mean) CHECK(std::abs(m - 0.5) < 3.0 * sd);
    CHECK(identical(s, generate(g)));
    auto other = g;
    other.seed = 2;
    CHECK_FALSE(identical(s, generate(other)));

    CHECK(g.source_support.contains(interior_point()));
    CHECK(g.target_support.contains(interior_point()));
    CHECK(g.source_support.contains(exterior_point()));
    CHECK_FALSE(g.target_support.contains(exterior_point()));
    CHECK(g.source_support.density(interior_point(), 5) == 1.0);
}

TEST_CASE("noiseless responses equal the regression function") {
    for (auto kind : {GeneratorKind::SameDim, GeneratorKind::Manifold}) {
        auto g = spec(kind, 200, 200);
        g.noise_sd = 0.0;
        const SampleSet s = generate(g);
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.y(i) == f_star(s.x(i), g.anchor, g.beta_true));
    }
}

TEST_CASE("manifold generator") {
    const auto g = spec(GeneratorKind::Manifold, 300, 2000);
    const SampleSet s = generate(g);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto x = s.x(i);
        if (s.origin(i) == Origin::Target) {
            CHECK(x[2] == doctest::Approx((2 * x[0] - 1) * (2 * x[0] - 1)).epsilon(1e-12));
            CHECK(x[3] == doctest::Approx((2 * x[1] - 1) * (2 * x[1] - 1)).epsilon(1e-12));
            CHECK(x[4] == doctest::Approx(x[0] * x[1]).epsilon(1e-12));
        } else {
            CHECK(g.source_support.contains(x));
        }
    }
}

TEST_CASE("approximate manifold") {
    auto exact = spec(GeneratorKind::Manifold, 100, 500, 9);
    auto approx = exact;
    approx.kind = GeneratorKind::ApproxManifold;
    const SampleSet m = generate(exact);
    CHECK(identical(m, generate(approx)));

    approx.rho = 0.05;
    const SampleSet a = generate(approx);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.origin(i) == Origin::Source) {
            for (std::size_t j = 0; j < 5; ++j) CHECK(a.x(i)[j] == m.x(i)[j]);
            continue;
        }
        for (std::size_t j = 0; j < 5; ++j) worst = std::max(worst, std::abs(a.x(i)[j] - m.x(i)[j]));
    }
    CHECK(worst <= 0.05);
    CHECK(worst > 0.04);
}

TEST_CASE("generator validation") {
    auto g = spec(GeneratorKind::Manifold, 1, 1);
    g.rho = 0.1;
    CHECK_THROWS_AS(generate(g), InputError);
    g = spec(GeneratorKind::SameDim, 1, 1);
    g.d = 2;
    CHECK_THROWS_AS(generate(g), InputError);
    g = spec(GeneratorKind::Manifold, 1, 1);
    g.anchor.pop_back();
    CHECK_THROWS_AS(generate(g), InputError);
    g = spec(GeneratorKind::Manifold, 1, 1);
    g.noise_sd = -1.0;
    CHECK_THROWS_AS(generate(g), InputError);
    CHECK_THROWS_AS(gen_samedim(spec(GeneratorKind::Manifold, 1, 1)), InputError);
    CHECK(parse_generator_kind(to_string(GeneratorKind::ApproxManifold)) == GeneratorKind::ApproxManifold);
    CHECK_THROWS_AS(parse_generator_kind("torus"), InputError);
}
