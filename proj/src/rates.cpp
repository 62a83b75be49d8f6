#include "covshift/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "covshift/error.hpp"

namespace covshift {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

// log(n_P^{(2b+d)/(2b+D)} + n_Q)
double log_n_eff(double n_p, double n_q, double beta, int d, int D) {
    const double a = (2.0 * beta + d) / (2.0 * beta + D);
    return log_add_exp(a * safe_log(n_p), safe_log(n_q));
}

// log(n_P + n_Q rho^{d-D}); rho must be positive when d < D and n_Q > 0.
double log_ambient_mass(const RegimeParams& p) {
    const double lq = p.d == p.D ? safe_log(p.n_q) : safe_log(p.n_q) + (p.d - p.D) * safe_log(p.rho);
    return log_add_exp(safe_log(p.n_p), lq);
}

}  // namespace

void RegimeParams::validate() const {
    if (!(n_p >= 0.0) || !(n_q >= 0.0)) throw InputError("sample sizes must be non-negative");
    if (!(n_p + n_q >= 1.0)) throw InputError("n_P + n_Q must be at least 1");
    if (!(beta > 0.0)) throw InputError("beta must be positive");
    if (d < 1 || d > D) throw InputError("dimensions must satisfy 1 <= d <= D");
    if (!(rho >= 0.0)) throw InputError("rho must be non-negative");
}

std::string_view to_string(Regime r) { return r == Regime::SmallRho ? "SmallRho" : "LargeRho"; }

double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

KappaStar kappa_star(const RegimeParams& p) {
    p.validate();
    const double ln = log_n_eff(p.n_p, p.n_q, p.beta, p.d, p.D);
    return {std::exp(-ln / (2.0 * p.beta + p.d)), std::exp(ln)};
}

double psi_n(const RegimeParams& p, double h) {
    p.validate();
    if (!(h > 0.0)) throw InputError("bandwidth must be positive");
    const double n = p.n_p + p.n_q;
    const double scale = p.d == p.D ? 1.0 : std::exp((p.d - p.D) * std::log(std::max(p.rho, h)));
    return p.n_p / n + p.n_q / n * scale;
}

double tau_n(const RegimeParams& p, double h, double exponent) {
    p.validate();
    if (!(h > 0.0)) throw InputError("bandwidth must be positive");
    if (!(exponent > 1.0)) throw InputError("tau exponent must exceed 1");
    const double lh = p.D * std::log(h);
    const double lq = safe_log(p.n_q) + (p.d - p.D) * std::log(std::max(p.rho, h)) + lh;
    const double log_base = log_add_exp(safe_log(p.n_p) + lh, lq);
    if (log_base == kNegInf) throw InputError("tau_n: degenerate configuration with zero base");
    return std::exp(-exponent * log_base);
}

RegimeLabel classify_regime(const RegimeParams& p, double boundary_multiplier) {
    const KappaStar k = kappa_star(p);
    if (p.rho == 0.0 || p.d == p.D) return {Regime::SmallRho, k.kappa};
    return {p.rho <= boundary_multiplier * k.kappa ? Regime::SmallRho : Regime::LargeRho, k.kappa};
}

OracleBandwidth oracle_bandwidth(const RegimeParams& p, double c4, double boundary_multiplier) {
    if (!(c4 > 0.0)) throw InputError("bandwidth constant must be positive");
    const RegimeLabel label = classify_regime(p, boundary_multiplier);
    if (label.regime == Regime::SmallRho) return {c4 * label.kappa_star, label};
    const double lm = log_ambient_mass(p);
    return {c4 * std::exp(-lm / (2.0 * p.beta + p.D)), label};
}

double sim_bandwidth_samedim(double count, double density, double beta, int d) {
    if (!(count > 0.0) || !(density > 0.0)) throw InputError("bandwidth recipe needs positive count and density");
    if (!(beta > 0.0) || d < 1) throw InputError("invalid smoothness or dimension");
    return std::exp(-(std::log(count) + std::log(density)) / (2.0 * beta + d));
}

ManifoldBandwidths sim_bandwidth_manifold(double n_p, double n_q, double beta, int d, int D) {
    if (!(n_q >= 1.0)) throw InputError("manifold bandwidth recipe needs n_Q >= 1");
    if (!(n_p >= 0.0) || !(beta > 0.0) || d < 1 || d > D) throw InputError("invalid bandwidth recipe parameters");
    const double e = 2.0 * beta + d;
    return {std::exp(-log_n_eff(n_p, n_q, beta, d, D) / e), std::exp(-std::log(n_q) / e)};
}

double lepski_bandwidth(double n_p, double n_q, double beta, int d, int D, double c_h) {
    const double n = n_p + n_q;
    if (!(n >= 3.0)) throw InputError("Lepski bandwidth needs n_P + n_Q >= 3");
    if (!(beta > 0.0) || d < 1 || d > D || !(c_h > 0.0)) throw InputError("invalid Lepski bandwidth parameters");
    const double lr = log_n_eff(n_p, n_q, beta, d, D) - std::log(std::log(n));
    return c_h * std::exp(-lr / (2.0 * beta + d));
}

double theoretical_rate(const RegimeParams& p, double boundary_multiplier) {
    p.validate();
    const double two_b = 2.0 * p.beta;
    if (p.d == p.D) return std::exp(-two_b / (two_b + p.D) * std::log(p.n_p + p.n_q));
    const RegimeLabel label = classify_regime(p, boundary_multiplier);
    if (label.regime == Regime::LargeRho) return std::exp(-two_b / (two_b + p.D) * log_ambient_mass(p));
    return std::exp(-two_b / (two_b + p.d) * log_n_eff(p.n_p, p.n_q, p.beta, p.d, p.D));
}

double adaptive_rate(const RegimeParams& p) {
    p.validate();
    const double n = p.n_p + p.n_q;
    if (!(n >= 3.0)) throw InputError("adaptive rate needs n_P + n_Q >= 3");
    const double lr = log_n_eff(p.n_p, p.n_q, p.beta, p.d, p.D) - std::log(std::log(n));
    return std::exp(-2.0 * p.beta / (2.0 * p.beta + p.d) * lr);
}

}  // namespace covshift
