#pragma once

#include <string_view>
#include <utility>

namespace covshift {

/// Sample sizes, smoothness and geometry of one covariate-shift problem.
struct RegimeParams {
    double n_p = 0.0;   ///< source sample size
    double n_q = 1.0;   ///< target sample size
    double beta = 1.0;  ///< Hoelder smoothness
    int d = 1;          ///< intrinsic dimension of the target support
    int D = 1;          ///< ambient dimension
    double rho = 0.0;   ///< distance of the target support from the exact manifold

    void validate() const;
};

enum class Regime { SmallRho, LargeRho };

std::string_view to_string(Regime r);

struct RegimeLabel {
    Regime regime = Regime::SmallRho;
    double kappa_star = 0.0;
};

struct KappaStar {
    double kappa = 0.0;
    double n_eff = 0.0;  ///< n_P^{(2b+d)/(2b+D)} + n_Q
};

/// (n_P^{(2b+d)/(2b+D)} + n_Q)^{-1/(2b+d)}, together with the effective sample size.
KappaStar kappa_star(const RegimeParams& p);

/// n_P/n + (n_Q/n) max(rho, h)^{d-D}
double psi_n(const RegimeParams& p, double h);

/// (n_P h^D + n_Q max(rho, h)^{d-D} h^D)^{-exponent}
double tau_n(const RegimeParams& p, double h, double exponent);

/// SmallRho iff rho <= boundary_multiplier * kappa_star (rho = 0 is always SmallRho).
RegimeLabel classify_regime(const RegimeParams& p, double boundary_multiplier = 1.0);

struct OracleBandwidth {
    double h = 0.0;
    RegimeLabel label{};
};

/// Pointwise-optimal bandwidth with known (beta, d): C4 (n_P + n_Q rho^{d-D})^{-1/(2b+D)}
/// for LargeRho and C4 * kappa_star for SmallRho.
OracleBandwidth oracle_bandwidth(const RegimeParams& p, double c4 = 1.0, double boundary_multiplier = 1.0);

/// (count * density)^{-1/(2b+d)}; with count = n and density = the mixture density at x_star
/// this is the pooled bandwidth of the same-dimension design, with count = n_Q and
/// density = q(x_star) the target-only one.
double sim_bandwidth_samedim(double count, double density, double beta, int d);

struct ManifoldBandwidths {
    double pooled = 0.0;
    double target_only = 0.0;
};

/// Pooled (n_Q + n_P^{(2b+d)/(2b+D)})^{-1/(2b+d)} and target-only n_Q^{-1/(2b+d)}.
ManifoldBandwidths sim_bandwidth_manifold(double n_p, double n_q, double beta, int d, int D);

/// C_h ((n_Q + n_P^{(2b+d)/(2b+D)}) / log n)^{-1/(2b+d)} with n = n_P + n_Q >= 3, natural log.
double lepski_bandwidth(double n_p, double n_q, double beta, int d, int D, double c_h);

/// Squared-error minimax rate of the regime (up to constants).
double theoretical_rate(const RegimeParams& p, double boundary_multiplier = 1.0);

/// ((n_Q + n_P^{(2b+d)/(2b+D)}) / log n)^{-2b/(2b+d)}: rate of the smoothness-adaptive estimator.
double adaptive_rate(const RegimeParams& p);

/// log(exp(a) + exp(b)) without overflow; either argument may be -inf.
double log_add_exp(double a, double b);

}  // namespace covshift
