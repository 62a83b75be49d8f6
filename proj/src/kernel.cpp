#include "covshift/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "covshift/error.hpp"

namespace covshift {

double KernelSpec::lower_bound() const noexcept {
    return kind == KernelKind::Box ? 0.5 : kEpanechnikovFloor;
}

double KernelSpec::upper_bound() const noexcept { return kind == KernelKind::Box ? 0.5 : 0.75; }

double kernel_eval(const KernelSpec& spec, std::span<const double> u) {
    double sq = 0.0;
    double sup = 0.0;
    for (double v : u) {
        sq += v * v;
        sup = std::max(sup, std::abs(v));
    }
    const bool inside = spec.support == SupportShape::Ball ? sq <= 1.0 : sup <= 1.0;
    if (!inside) return 0.0;
    switch (spec.kind) {
        case KernelKind::Box:
            return 0.5;
        case KernelKind::Epanechnikov:
            return std::max(0.75 * (1.0 - sq), KernelSpec::kEpanechnikovFloor);
    }
    return 0.0;
}

double scaled_kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> x_star,
                     double h) {
    if (!(h > 0.0)) throw InputError("bandwidth must be positive");
    if (x.size() != x_star.size()) throw InputError("scaled_kernel: dimension mismatch");
    double buf[64];
    std::vector<double> heap;
    double* u = buf;
    if (x.size() > 64) {
        heap.resize(x.size());
        u = heap.data();
    }
    for (std::size_t j = 0; j < x.size(); ++j) u[j] = (x[j] - x_star[j]) / h;
    return kernel_eval(spec, std::span<const double>(u, x.size()));
}

KernelKind parse_kernel_kind(std::string_view name) {
    if (name == "box") return KernelKind::Box;
    if (name == "epa" || name == "epanechnikov") return KernelKind::Epanechnikov;
    throw InputError("unknown kernel '" + std::string(name) + "' (expected box or epa)");
}

std::string_view to_string(KernelKind kind) {
    return kind == KernelKind::Box ? "box" : "epa";
}

}  // namespace covshift
