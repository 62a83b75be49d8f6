#pragma once

#include <span>
#include <string_view>

namespace covshift {

enum class KernelKind {
    Box,           ///< 1/2 on the support
    Epanechnikov,  ///< max(3/4 (1 - |u|^2), floor) on the support
};

/// Shape of the unit support.
enum class SupportShape {
    Ball,  ///< |u|_2 <= 1
    Cube,  ///< |u|_inf <= 1
};

/// Compactly supported, symmetric kernel bounded above and below on its support.
struct KernelSpec {
    KernelKind kind = KernelKind::Box;
    SupportShape support = SupportShape::Ball;

    static constexpr double kEpanechnikovFloor = 0.05;

    /// Infimum of K over the support.
    double lower_bound() const noexcept;
    /// Supremum of K over the support.
    double upper_bound() const noexcept;
};

double kernel_eval(const KernelSpec& spec, std::span<const double> u);

/// K((x - x_star) / h), without any 1/h^D prefactor.
double scaled_kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> x_star,
                     double h);

KernelKind parse_kernel_kind(std::string_view name);
std::string_view to_string(KernelKind kind);

}  // namespace covshift
