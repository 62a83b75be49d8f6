#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

#include "covshift/error.hpp"
#include "covshift/poly_basis.hpp"

using namespace covshift;

namespace {

// Every exponent tuple with sum <= degree, by brute force over [0, degree]^dim.
std::set<std::vector<int>> all_tuples(int dim, int degree) {
    std::set<std::vector<int>> out;
    std::vector<int> e(static_cast<std::size_t>(dim), 0);
    while (true) {
        int s = 0;
        for (int v : e) s += v;
        if (s <= degree) out.insert(e);
        int j = 0;
        while (j < dim && ++e[static_cast<std::size_t>(j)] > degree) e[static_cast<std::size_t>(j++)] = 0;
        if (j == dim) break;
    }
    return out;
}

double naive_feature(const std::vector<int>& a, const std::vector<double>& u) {
    double v = 1.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double f = 1.0;
        for (int t = 2; t <= a[j]; ++t) f *= t;
        v *= std::pow(u[j], a[j]) / f;
    }
    return v;
}

}  // namespace

TEST_CASE("basis for two variables of degree two") {
    const PolyBasis b = build_basis(2, 2);
    const std::vector<std::vector<int>> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    REQUIRE(b.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(b.indices()[i].exponents == expected[i]);
}

TEST_CASE("constant basis") {
    const PolyBasis b = build_basis(1, 0);
    REQUIRE(b.size() == 1);
    CHECK(b.indices()[0].exponents == std::vector<int>{0});
}

TEST_CASE("enumeration matches brute force") {
    for (int dim = 1; dim <= 5; ++dim)
        for (int deg = 0; deg <= 4; ++deg) {
            const PolyBasis b = build_basis(dim, deg);
            std::set<std::vector<int>> got;
            int last_degree = 0;
            for (const auto& m : b.indices()) {
                got.insert(m.exponents);
                CHECK(m.total_degree() >= last_degree);
                last_degree = m.total_degree();
            }
            CHECK(got.size() == b.size());
            CHECK(got == all_tuples(dim, deg));
        }
    CHECK(build_basis(5, 2).size() == 21);
}

TEST_CASE("size is binomial(dim + degree, degree)") {
    for (int dim = 1; dim <= 8; ++dim)
        for (int deg = 0; deg <= 5; ++deg) {
            double binom = 1.0;
            for (int i = 1; i <= deg; ++i) binom = binom * (dim + i) / i;
            CHECK(basis_size(dim, deg) == static_cast<std::size_t>(std::llround(binom)));
            CHECK(build_basis(dim, deg).size() == basis_size(dim, deg));
        }
}

TEST_CASE("feature values") {
    CHECK(build_basis(2, 1).eval(std::vector<double>{0.0, 0.0}) == std::vector<double>{1.0, 0.0, 0.0});
    CHECK(build_basis(1, 2).eval(std::vector<double>{2.0}) == std::vector<double>{1.0, 2.0, 2.0});
    CHECK(build_basis(2, 2).eval(std::vector<double>{1.0, 1.0}) ==
          std::vector<double>{1.0, 1.0, 1.0, 0.5, 1.0, 0.5});
}

TEST_CASE("zero input gives the first unit vector") {
    for (int dim = 1; dim <= 5; ++dim) {
        const PolyBasis b(dim, 3);
        const auto z = b.eval(std::vector<double>(static_cast<std::size_t>(dim), 0.0));
        CHECK(z[0] == 1.0);
        for (std::size_t i = 1; i < z.size(); ++i) CHECK(z[i] == 0.0);
    }
}

TEST_CASE("features match a naive evaluator") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.5, 1.5);
    for (int dim = 1; dim <= 5; ++dim)
        for (int deg = 0; deg <= 4; ++deg) {
            const PolyBasis b(dim, deg);
            for (int rep = 0; rep < 5; ++rep) {
                std::vector<double> u(static_cast<std::size_t>(dim));
                for (auto& v : u) v = unit(rng);
                const auto z = b.eval(u);
                for (std::size_t i = 0; i < z.size(); ++i)
                    CHECK(z[i] == doctest::Approx(naive_feature(b.indices()[i].exponents, u)).epsilon(1e-13));
            }
        }
}

TEST_CASE("dimension mismatch and bad arguments are rejected") {
    const PolyBasis b(3, 2);
    CHECK_THROWS_AS(b.eval(std::vector<double>{1.0, 2.0}), InputError);
    CHECK_THROWS_AS(PolyBasis(0, 1), InputError);
    CHECK_THROWS_AS(PolyBasis(2, -1), InputError);
    CHECK_THROWS_AS(PolyBasis(2, PolyBasis::kMaxDegree + 1), InputError);
}
