#include "covshift/dim_est.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "covshift/error.hpp"

namespace covshift {

namespace {

inline double squared_distance(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double t = a[j] - b[j];
        s += t * t;
    }
    return s;
}

void check(PointView points, int k) {
    if (points.dim == 0 || points.coords.size() % points.dim != 0)
        throw InputError("point buffer does not hold whole points");
    if (k < 1) throw InputError("k must be at least 1");
    if (static_cast<std::size_t>(k) + 1 > points.size())
        throw InputError("need at least k + 1 = " + std::to_string(k + 1) + " points, got " +
                         std::to_string(points.size()));
}

int half_rank(int k) { return (k + 1) / 2; }

}  // namespace

DimMethod parse_dim_method(std::string_view name) {
    if (name == "avg" || name == "average") return DimMethod::Average;
    if (name == "vote") return DimMethod::Vote;
    throw InputError("unknown dimension aggregation '" + std::string(name) + "' (expected avg or vote)");
}

std::string_view to_string(DimMethod m) { return m == DimMethod::Average ? "avg" : "vote"; }

double knn_radius(PointView points, std::size_t i, int k) {
    check(points, k);
    if (i >= points.size()) throw InputError("point index out of range");
    std::vector<double> d;
    d.reserve(points.size() - 1);
    const double* xi = points.coords.data() + i * points.dim;
    for (std::size_t j = 0; j < points.size(); ++j)
        if (j != i) d.push_back(squared_distance(xi, points.coords.data() + j * points.dim, points.dim));
    std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
    return std::sqrt(d[static_cast<std::size_t>(k - 1)]);
}

std::vector<RadiusPair> knn_radius_pairs_serial(PointView points, int k) {
    check(points, k);
    const std::size_t n = points.size();
    const auto kh = static_cast<std::size_t>(half_rank(k) - 1);
    const auto kf = static_cast<std::size_t>(k - 1);
    std::vector<RadiusPair> out(n);
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = points.coords.data() + i * points.dim;
        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) d[m++] = squared_distance(xi, points.coords.data() + j * points.dim, points.dim);
        std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kf), d.end());
        const double full = d[kf];
        std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kh), d.begin() + static_cast<std::ptrdiff_t>(kf));
        out[i] = {std::sqrt(d[kh]), std::sqrt(full)};
    }
    return out;
}

std::vector<RadiusPair> knn_radius_pairs(PointView points, int k) {
    check(points, k);
    const auto n = static_cast<std::ptrdiff_t>(points.size());
    const std::size_t dim = points.dim;
    const auto ku = static_cast<std::size_t>(k);
    const auto kh = static_cast<std::size_t>(half_rank(k) - 1);
    const double* base = points.coords.data();
    std::vector<RadiusPair> out(static_cast<std::size_t>(n));

#pragma omp parallel
    {
        std::vector<double> best(ku);
#pragma omp for schedule(dynamic, 64)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
            const double* xi = base + static_cast<std::size_t>(i) * dim;
            for (std::ptrdiff_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double s = squared_distance(xi, base + static_cast<std::size_t>(j) * dim, dim);
                if (s >= best[ku - 1]) continue;
                std::size_t pos = ku - 1;
                while (pos > 0 && best[pos - 1] > s) {
                    best[pos] = best[pos - 1];
                    --pos;
                }
                best[pos] = s;
            }
            out[static_cast<std::size_t>(i)] = {std::sqrt(best[kh]), std::sqrt(best[ku - 1])};
        }
    }
    return out;
}

int local_dim_from_radii(double r_half, double r_full, int ambient_dim) {
    if (ambient_dim < 1) throw InputError("ambient dimension must be positive");
    if (r_full <= r_half) return ambient_dim;  // ratio 1 (or 0/0)
    if (r_half == 0.0) return 1;               // ratio infinite
    const double est = std::log(2.0) / std::log(r_full / r_half);
    if (!(est < static_cast<double>(ambient_dim))) return ambient_dim;
    return std::clamp(static_cast<int>(std::round(est)), 1, ambient_dim);
}

int local_dim(PointView points, std::size_t i, int k) {
    if (k < 2) throw InputError("local dimension needs k >= 2");
    const double full = knn_radius(points, i, k);
    const double half = knn_radius(points, i, half_rank(k));
    return local_dim_from_radii(half, full, static_cast<int>(points.dim));
}

DimEstimate estimate_dim(PointView points, int k, DimMethod method) {
    if (k < 2) throw InputError("dimension estimation needs k >= 2");
    const auto radii = knn_radius_pairs(points, k);
    const int D = static_cast<int>(points.dim);

    DimEstimate est;
    est.k = k;
    est.method = method;
    est.histogram.assign(static_cast<std::size_t>(D) + 1, 0);
    est.local.reserve(radii.size());
    long long sum = 0;
    for (const auto& r : radii) {
        const int d = local_dim_from_radii(r.half, r.full, D);
        est.local.push_back(d);
        ++est.histogram[static_cast<std::size_t>(d)];
        sum += d;
    }
    const double mean = static_cast<double>(sum) / static_cast<double>(radii.size());
    est.d_avg = std::clamp(static_cast<int>(std::round(mean)), 1, D);
    // first maximum wins, i.e. ties go to the smaller dimension
    est.d_vote = static_cast<int>(std::max_element(est.histogram.begin() + 1, est.histogram.end()) -
                                  est.histogram.begin());
    return est;
}

}  // namespace covshift
