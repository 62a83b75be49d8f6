#include <cmath>
#include <random>

#include "doctest.h"

#include "covshift/error.hpp"
#include "covshift/kernel.hpp"

using namespace covshift;

TEST_CASE("box kernel values") {
    const KernelSpec box{};
    CHECK(kernel_eval(box, std::vector<double>{0.0, 0.0}) == 0.5);
    CHECK(kernel_eval(box, std::vector<double>{1.0001}) == 0.0);
    CHECK(kernel_eval(box, std::vector<double>{1.0}) == 0.5);
    CHECK(kernel_eval(box, std::vector<double>{0.6, 0.8}) == 0.5);
}

TEST_CASE("scaled kernel has no bandwidth prefactor") {
    const KernelSpec box{};
    const std::vector<double> xs{0.3, -0.2};
    for (double h : {0.01, 1.0, 50.0}) {
        CHECK(scaled_kernel(box, xs, xs, h) == 0.5);
        CHECK(scaled_kernel(box, std::vector<double>{0.3 + 2 * h, -0.2}, xs, h) == 0.0);
        CHECK(scaled_kernel(box, std::vector<double>{0.3 + 0.5 * h, -0.2}, xs, h) == 0.5);
    }
    CHECK_THROWS_AS(scaled_kernel(box, xs, xs, 0.0), InputError);
    CHECK_THROWS_AS(scaled_kernel(box, xs, xs, -1.0), InputError);
    CHECK_THROWS_AS(scaled_kernel(box, std::vector<double>{1.0}, xs, 1.0), InputError);
}

TEST_CASE("symmetry, support and bounds") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(-1.3, 1.3);
    for (auto kind : {KernelKind::Box, KernelKind::Epanechnikov})
        for (auto shape : {SupportShape::Ball, SupportShape::Cube}) {
            const KernelSpec k{kind, shape};
            for (int rep = 0; rep < 2000; ++rep) {
                std::vector<double> u(1 + rep % 5);
                for (auto& v : u) v = unit(rng);
                std::vector<double> neg(u.size());
                for (std::size_t j = 0; j < u.size(); ++j) neg[j] = -u[j];
                const double val = kernel_eval(k, u);
                CHECK(val == kernel_eval(k, neg));
                double r2 = 0.0, rinf = 0.0;
                for (double v : u) {
                    r2 += v * v;
                    rinf = std::max(rinf, std::abs(v));
                }
                const bool inside = shape == SupportShape::Ball ? r2 <= 1.0 : rinf <= 1.0;
                CHECK((val > 0.0) == inside);
                if (inside) {
                    CHECK(val >= k.lower_bound());
                    CHECK(val <= k.upper_bound());
                }
            }
        }
}

TEST_CASE("epanechnikov floor and peak") {
    const KernelSpec epa{KernelKind::Epanechnikov, SupportShape::Ball};
    CHECK(kernel_eval(epa, std::vector<double>{0.0}) == doctest::Approx(0.75));
    CHECK(kernel_eval(epa, std::vector<double>{0.999}) == doctest::Approx(KernelSpec::kEpanechnikovFloor));
    CHECK(epa.lower_bound() == KernelSpec::kEpanechnikovFloor);
}

TEST_CASE("kernel names") {
    CHECK(parse_kernel_kind("box") == KernelKind::Box);
    CHECK(parse_kernel_kind("epa") == KernelKind::Epanechnikov);
    CHECK_THROWS_AS(parse_kernel_kind("gauss"), InputError);
}
