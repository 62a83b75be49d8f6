#include "covshift/poly_basis.hpp"

#include <array>
#include <numeric>
#include <string>

#include "covshift/error.hpp"

namespace covshift {

namespace {

// All exponent tuples of length `dim` summing to exactly `total`, leading
// exponent descending.
void append_degree(int dim, int total, std::vector<int>& current, int pos,
                   std::vector<MultiIndex>& out) {
    if (pos == dim - 1) {
        current[pos] = total;
        out.push_back(MultiIndex{current});
        return;
    }
    for (int e = total; e >= 0; --e) {
        current[pos] = e;
        append_degree(dim, total - e, current, pos + 1, out);
    }
    current[pos] = 0;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

int MultiIndex::total_degree() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0);
}

PolyBasis::PolyBasis(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1) throw InputError("polynomial basis needs dim >= 1");
    if (degree < 0 || degree > kMaxDegree)
        throw InputError("polynomial degree must lie in [0, " + std::to_string(kMaxDegree) + "]");

    indices_.reserve(basis_size(dim, degree));
    std::vector<int> current(static_cast<std::size_t>(dim), 0);
    for (int t = 0; t <= degree; ++t) append_degree(dim, t, current, 0, indices_);

    inv_factorial_.reserve(indices_.size());
    for (const auto& idx : indices_) {
        double f = 1.0;
        for (int e : idx.exponents) f *= factorial(e);
        inv_factorial_.push_back(1.0 / f);
    }
}

void PolyBasis::eval_into(std::span<const double> u, std::span<double> out) const {
    if (u.size() != static_cast<std::size_t>(dim_))
        throw InputError("eval_features: expected " + std::to_string(dim_) + " coordinates, got " +
                         std::to_string(u.size()));
    if (out.size() != indices_.size()) throw InputError("eval_features: output span has wrong length");

    // Power table powers[j * stride + e] = u_j^e, e <= degree.
    const std::size_t stride = static_cast<std::size_t>(degree_) + 1;
    const std::size_t table = static_cast<std::size_t>(dim_) * stride;
    std::array<double, 256> local;
    std::vector<double> heap;
    double* powers = local.data();
    if (table > local.size()) {
        heap.resize(table);
        powers = heap.data();
    }
    for (int j = 0; j < dim_; ++j) {
        double* row = powers + j * stride;
        row[0] = 1.0;
        for (int e = 1; e <= degree_; ++e) row[e] = row[e - 1] * u[j];
    }

    for (std::size_t k = 0; k < indices_.size(); ++k) {
        const auto& ex = indices_[k].exponents;
        double v = inv_factorial_[k];
        for (int j = 0; j < dim_; ++j)
            if (ex[j] != 0) v *= powers[j * stride + ex[j]];
        out[k] = v;
    }
}

std::vector<double> PolyBasis::eval(std::span<const double> u) const {
    std::vector<double> out(indices_.size());
    eval_into(u, out);
    return out;
}

PolyBasis build_basis(int dim, int degree) { return PolyBasis(dim, degree); }

std::size_t basis_size(int dim, int degree) {
    // binomial(dim + degree, degree), exact in integers for the supported range
    std::size_t r = 1;
    for (int i = 1; i <= degree; ++i) r = r * static_cast<std::size_t>(dim + i) / static_cast<std::size_t>(i);
    return r;
}

}  // namespace covshift
