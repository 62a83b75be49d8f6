#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace covshift {

/// Read-only view of `size()` points of dimension `dim`, stored row-major.
struct PointView {
    std::span<const double> coords;
    std::size_t dim = 0;

    std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
    std::span<const double> point(std::size_t i) const noexcept { return coords.subspan(i * dim, dim); }
};

enum class DimMethod { Average, Vote };

DimMethod parse_dim_method(std::string_view name);
std::string_view to_string(DimMethod m);

struct DimEstimate {
    std::vector<int> local;      ///< per-point estimates, capped to [1, D]
    std::vector<int> histogram;  ///< histogram[d] = #points with local estimate d, d in [0, D]
    int d_avg = 1;
    int d_vote = 1;
    int k = 0;
    DimMethod method = DimMethod::Average;

    int selected() const noexcept { return method == DimMethod::Average ? d_avg : d_vote; }
};

/// Distance from point i to its k-th nearest other point (self excluded, duplicates kept).
double knn_radius(PointView points, std::size_t i, int k);

/// (r^{(ceil(k/2))}, r^{(k)}) for every point.
struct RadiusPair {
    double half = 0.0;
    double full = 0.0;
};

/// OpenMP kernel: bounded insertion into a k-array per query point.
std::vector<RadiusPair> knn_radius_pairs(PointView points, int k);
/// Serial reference: full distance vector and nth_element per point.
std::vector<RadiusPair> knn_radius_pairs_serial(PointView points, int k);

/// Nearest integer to log 2 / log(r_full / r_half), capped to [1, ambient_dim].
/// r_full == r_half (including duplicates) maps to ambient_dim; r_half == 0 < r_full maps to 1.
int local_dim_from_radii(double r_half, double r_full, int ambient_dim);

int local_dim(PointView points, std::size_t i, int k);

DimEstimate estimate_dim(PointView points, int k, DimMethod method = DimMethod::Average);

}  // namespace covshift
