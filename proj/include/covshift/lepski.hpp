#pragma once

#include <optional>
#include <span>
#include <vector>

#include "covshift/dim_est.hpp"
#include "covshift/kernel.hpp"
#include "covshift/lpr.hpp"
#include "covshift/sample.hpp"

namespace covshift {

/// Uniform candidate grid for the smoothness index with spacing of order 1/log n.
struct SmoothnessGrid {
    double beta_min = 1.0;
    double beta_max = 1.0;
    double spacing_target = 0.0;  ///< 1 / log n
    std::vector<double> values;
};

/// Step (beta_max - beta_min) / ceil((beta_max - beta_min) log n), both endpoints included.
SmoothnessGrid build_grid(std::size_t n, double beta_min, double beta_max);

/// Grid with explicit values (strictly increasing).
SmoothnessGrid grid_from_values(std::vector<double> values);

struct Violation {
    double eta = 0.0;
    double gap = 0.0;
    double threshold = 0.0;
};

struct CandidateRecord {
    double beta = 0.0;
    double h = 0.0;
    int degree = 0;
    double estimate = 0.0;
    bool fit_ok = false;
    bool passed = false;
    std::optional<Violation> first_violation;
};

struct LepskiTrace {
    std::vector<CandidateRecord> candidates;
    double selected_beta = 0.0;
    double selected_h = 0.0;
    double final_value = 0.0;
};

struct LepskiOptions {
    double c_h = 1.5;
    double c_ell = 0.5;
    KernelSpec kernel{};
    SolveMode solve = SolveMode::MinNorm;
    /// Theory mode: apply the eigenvalue truncation with tau exponent `truncation_exponent`.
    bool truncate = false;
    double truncation_exponent = 2.0;
};

/// Candidate estimates at x_star for every grid value, each with bandwidth
/// lepski_bandwidth(beta) and degree floor(beta).
std::vector<CandidateRecord> lepski_candidates(const SampleSet& data, std::span<const double> x_star,
                                               const SmoothnessGrid& grid, int d_hat, const LepskiOptions& opts);

/// Largest candidate whose estimate lies within c_ell * h_eta^eta of the estimate at
/// every grid value eta <= beta. Candidates whose fit failed take no part in the
/// comparisons. Fills `passed`/`first_violation` and the selection in the trace.
/// Throws AdaptiveFailure when no candidate produced an estimate.
LepskiTrace lepski_choose(std::vector<CandidateRecord> candidates, double c_ell);

LepskiTrace lepski_select(const SampleSet& data, std::span<const double> x_star, const SmoothnessGrid& grid,
                          int d_hat, const LepskiOptions& opts);

struct AdaptiveOptions {
    int k = 10;
    double beta_min = 1.0;
    double beta_max = 5.0;
    DimMethod dim_method = DimMethod::Average;
    LepskiOptions lepski{};
};

struct AdaptiveResult {
    double value = 0.0;
    int d_hat = 0;
    DimEstimate dims;
    SmoothnessGrid grid;
    LepskiTrace trace;
};

/// Intrinsic dimension from the target covariates, then smoothness by Lepski's rule.
AdaptiveResult adaptive_estimate(const SampleSet& data, std::span<const double> x_star,
                                 const AdaptiveOptions& opts = {});

}  // namespace covshift
