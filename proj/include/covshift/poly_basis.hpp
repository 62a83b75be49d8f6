#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace covshift {

/// Exponent tuple of a monomial; one entry per variable.
struct MultiIndex {
    std::vector<int> exponents;

    int total_degree() const;
    bool operator==(const MultiIndex&) const = default;
};

/// Scaled monomials prod_j u_j^{a_j} / a_j! of total degree <= `degree` in `dim`
/// variables.
///
/// Indices are graded (by total degree) and, inside one degree, ordered
/// lexicographically with larger leading exponents first:
/// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
/// The zero index always comes first, so coefficient 0 of a local fit is the
/// fitted value at the centre.
class PolyBasis {
public:
    static constexpr int kMaxDegree = 6;

    PolyBasis(int dim, int degree);

    int dim() const noexcept { return dim_; }
    int degree() const noexcept { return degree_; }
    std::size_t size() const noexcept { return indices_.size(); }
    const std::vector<MultiIndex>& indices() const noexcept { return indices_; }

    /// Writes z(u) into `out` (length size()).
    void eval_into(std::span<const double> u, std::span<double> out) const;
    std::vector<double> eval(std::span<const double> u) const;

private:
    int dim_;
    int degree_;
    std::vector<MultiIndex> indices_;
    std::vector<double> inv_factorial_;  // 1 / prod_j a_j!, per index
};

PolyBasis build_basis(int dim, int degree);

/// binomial(dim + degree, degree)
std::size_t basis_size(int dim, int degree);

}  // namespace covshift
