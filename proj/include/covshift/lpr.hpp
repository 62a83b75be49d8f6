#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "covshift/kernel.hpp"
#include "covshift/poly_basis.hpp"
#include "covshift/sample.hpp"

namespace covshift {

/// Eigenvalue floor of the truncation rule: the fit is replaced by zero when
/// lambda_min(Z^T W Z) < n * tau * psi.
struct Truncation {
    double tau = 0.0;
    double psi = 1.0;
};

/// How the local normal equations are solved.
enum class SolveMode {
    /// Cholesky-type factorisation; a numerically singular system throws SingularSystem.
    Strict,
    /// Minimum-norm least squares on the weighted design. Falls back from the
    /// normal equations to a complete orthogonal decomposition when the Gram matrix
    /// is ill-conditioned. The value at x_star is still well defined when the
    /// design is rank deficient only along polynomials vanishing at x_star, which
    /// is what happens for covariates on an algebraic surface.
    MinNorm,
};

struct LprConfig {
    double bandwidth = 1.0;
    int degree = 0;
    KernelSpec kernel{};
    std::optional<Truncation> truncation{};
    double ridge_epsilon = 0.0;
    SolveMode solve = SolveMode::Strict;
    /// Relative eigenvalue floor below which Strict mode reports a singular system.
    double singular_rcond = 1e-12;
    /// Relative pivot threshold for the rank decision in MinNorm mode.
    double rank_rcond = 1e-10;
};

/// Local weighted least-squares system around x_star.
///
/// `design` holds the unweighted rows z((x_i - x_star)/h) of the samples with a
/// non-zero kernel weight; `active[r]` is the sample index of row r.
struct LocalSystem {
    Eigen::MatrixXd gram;    ///< sum_i K_i z_i z_i^T
    Eigen::VectorXd moment;  ///< sum_i K_i z_i y_i
    Eigen::MatrixXd design;
    Eigen::VectorXd kernel_weights;
    std::vector<std::size_t> active;
};

struct LprFit {
    double value = 0.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool truncated = false;
    bool rank_deficient = false;
    int rank = 0;
    std::size_t active_count = 0;
};

/// OpenMP kernel: per-sample kernel weights and design rows in parallel, Gram matrix
/// by a blocked product. Deterministic for any thread count.
LocalSystem assemble_system(const SampleSet& data, std::span<const double> x_star, const LprConfig& cfg);

/// Serial reference: one pass over the samples accumulating S and s entry by entry.
LocalSystem assemble_system_serial(const SampleSet& data, std::span<const double> x_star,
                                   const LprConfig& cfg);

/// Fits the local polynomial at x_star and returns the constant coefficient.
///
/// Throws SingularSystem in Strict mode when the Gram matrix is numerically
/// singular and truncation did not already zero the fit.
LprFit lpr_fit(const SampleSet& data, std::span<const double> x_star, const LprConfig& cfg);

/// Same computation on an already assembled system; `n_total` is the sample count
/// entering the truncation threshold and `y` the full response vector.
LprFit lpr_fit(const LocalSystem& system, std::size_t n_total, const LprConfig& cfg, std::span<const double> y);

/// Effective weights w with value = sum_i w_i y_i, one per sample (zero outside the
/// window). Throws NotAvailable for a truncated fit and SingularSystem as lpr_fit.
std::vector<double> effective_weights(const SampleSet& data, std::span<const double> x_star,
                                      const LprConfig& cfg);

}  // namespace covshift
