#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "covshift/kernel.hpp"
#include "covshift/lepski.hpp"
#include "covshift/lpr.hpp"
#include "covshift/synth.hpp"

namespace covshift {

enum class EstimatorKind {
    PooledOracle,      ///< source + target, bandwidth from the known (beta, d)
    TargetOnlyOracle,  ///< target rows only, bandwidth from the known (beta, d)
    PooledAdaptive,    ///< source + target, (d, beta) estimated from the data
};

EstimatorKind parse_estimator_kind(std::string_view name);
std::string_view to_string(EstimatorKind kind);

struct SweepPoint {
    std::size_t n_p = 0;
    std::size_t n_q = 0;
    double rho = 0.0;
};

enum class SlopeAxis { TargetSize, EffectiveSize };

struct ExperimentSpec {
    std::string name = "experiment";
    /// Template: n_p, n_q, rho and seed are overwritten for every run.
    GeneratorSpec generator;
    std::vector<SweepPoint> sweep;
    std::vector<EstimatorKind> estimators;
    int replications = 100;
    std::vector<double> x_star;
    double beta_for_oracle = 2.5;
    int d_for_oracle = 5;
    std::uint64_t base_seed = 0;

    KernelSpec kernel{};
    SolveMode solve = SolveMode::MinNorm;
    bool truncate = false;
    double truncation_exponent = 2.0;
    double c4 = 1.0;
    AdaptiveOptions adaptive{};
    SlopeAxis slope_axis = SlopeAxis::TargetSize;

    void validate() const;
};

/// Squared-error summary of one estimator at one sweep point.
struct CellResult {
    EstimatorKind estimator = EstimatorKind::PooledOracle;
    SweepPoint point{};
    double bandwidth = 0.0;  ///< oracle bandwidth; 0 for the adaptive estimator
    double mse = 0.0;
    double se = 0.0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    int n_failures = 0;
    int replications = 0;
    double mean_selected_beta = 0.0;  ///< adaptive only
    double mean_d_hat = 0.0;          ///< adaptive only
    std::vector<double> squared_errors;
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double r2 = 0.0;
};

struct SlopeRecord {
    EstimatorKind estimator = EstimatorKind::PooledOracle;
    std::size_t n_p = 0;
    double rho = 0.0;
    SlopeFit fit{};
};

struct McResult {
    std::string experiment;
    std::vector<CellResult> cells;
    std::vector<SlopeRecord> slopes;

    const CellResult& cell(EstimatorKind e, std::size_t n_p, std::size_t n_q, double rho = 0.0) const;
};

/// Ordinary least squares of log(mse) on log(n). Needs >= 3 points, all positive.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points);

/// Bandwidths the oracle estimators use at one sweep point (0 when undefined, e.g. a
/// target-only estimator at a point without target density).
struct OracleBandwidths {
    double pooled = 0.0;
    double target_only = 0.0;
};
OracleBandwidths oracle_bandwidths(const ExperimentSpec& spec, const SweepPoint& point);

/// Runs every sweep point and replication. Replication r uses generator seed
/// base_seed + r. Parallel over (point, replication) pairs; the result does not
/// depend on the thread count.
McResult run_experiment(const ExperimentSpec& spec);

void write_results_csv(std::ostream& out, const McResult& result);
/// Long-format rows back into cells (squared errors are not stored in the CSV).
std::vector<CellResult> read_results_csv(std::istream& in);

/// Writes <dir>/<name>.csv and <dir>/<name>.json; returns the two paths.
std::vector<std::string> emit_results(const McResult& result, const ExperimentSpec& spec, const std::string& dir);

}  // namespace covshift
