#include "covshift/lepski.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covshift/error.hpp"
#include "covshift/rates.hpp"

namespace covshift {

SmoothnessGrid build_grid(std::size_t n, double beta_min, double beta_max) {
    if (n < 3) throw InputError("smoothness grid needs n >= 3");
    if (!(beta_min > 0.0) || !(beta_max > beta_min)) throw InputError("smoothness grid needs 0 < beta_min < beta_max");
    const double log_n = std::log(static_cast<double>(n));
    const double range = beta_max - beta_min;
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil(range * log_n)));
    const double step = range / static_cast<double>(steps);

    SmoothnessGrid g;
    g.beta_min = beta_min;
    g.beta_max = beta_max;
    g.spacing_target = 1.0 / log_n;
    g.values.reserve(static_cast<std::size_t>(steps) + 1);
    for (long j = 0; j < steps; ++j) g.values.push_back(beta_min + static_cast<double>(j) * step);
    g.values.push_back(beta_max);
    return g;
}

SmoothnessGrid grid_from_values(std::vector<double> values) {
    if (values.empty()) throw InputError("smoothness grid must not be empty");
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (!(values[j] > 0.0)) throw InputError("smoothness values must be positive");
        if (j > 0 && !(values[j] > values[j - 1])) throw InputError("smoothness values must increase strictly");
    }
    SmoothnessGrid g;
    g.beta_min = values.front();
    g.beta_max = values.back();
    g.values = std::move(values);
    return g;
}

std::vector<CandidateRecord> lepski_candidates(const SampleSet& data, std::span<const double> x_star,
                                               const SmoothnessGrid& grid, int d_hat, const LepskiOptions& opts) {
    if (data.empty()) throw InputError("Lepski selection needs data");
    const auto n_p = static_cast<double>(data.n_source());
    const auto n_q = static_cast<double>(data.n_target());
    const int D = static_cast<int>(data.ambient_dim());

    std::vector<CandidateRecord> out;
    out.reserve(grid.values.size());
    for (double beta : grid.values) {
        CandidateRecord rec;
        rec.beta = beta;
        rec.h = lepski_bandwidth(n_p, n_q, beta, d_hat, D, opts.c_h);
        rec.degree = static_cast<int>(std::floor(beta + 1e-9));

        LprConfig cfg;
        cfg.bandwidth = rec.h;
        cfg.degree = rec.degree;
        cfg.kernel = opts.kernel;
        cfg.solve = opts.solve;
        if (opts.truncate) {
            const RegimeParams p{n_p, n_q, beta, d_hat, D, 0.0};
            cfg.truncation = Truncation{tau_n(p, rec.h, opts.truncation_exponent), psi_n(p, rec.h)};
        }
        try {
            const LprFit fit = lpr_fit(data, x_star, cfg);
            rec.estimate = fit.value;
            rec.fit_ok = std::isfinite(fit.value) && (fit.truncated || fit.rank > 0);
        } catch (const NumericalError&) {
            rec.fit_ok = false;
        }
        out.push_back(rec);
    }
    return out;
}

LepskiTrace lepski_choose(std::vector<CandidateRecord> candidates, double c_ell) {
    if (!(c_ell >= 0.0)) throw InputError("C_ell must be non-negative");
    LepskiTrace trace;
    std::optional<std::size_t> chosen;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        auto& cj = candidates[j];
        cj.passed = false;
        cj.first_violation.reset();
        if (!cj.fit_ok) continue;
        bool ok = true;
        for (std::size_t i = 0; i <= j; ++i) {
            const auto& ci = candidates[i];
            if (!ci.fit_ok) continue;
            const double gap = std::abs(cj.estimate - ci.estimate);
            const double threshold = c_ell * std::pow(ci.h, ci.beta);
            if (gap > threshold) {
                ok = false;
                cj.first_violation = Violation{ci.beta, gap, threshold};
                break;
            }
        }
        cj.passed = ok;
        if (ok) chosen = j;
    }
    if (!chosen) throw AdaptiveFailure("no smoothness candidate produced an estimate");
    trace.selected_beta = candidates[*chosen].beta;
    trace.selected_h = candidates[*chosen].h;
    trace.final_value = candidates[*chosen].estimate;
    trace.candidates = std::move(candidates);
    return trace;
}

LepskiTrace lepski_select(const SampleSet& data, std::span<const double> x_star, const SmoothnessGrid& grid,
                          int d_hat, const LepskiOptions& opts) {
    return lepski_choose(lepski_candidates(data, x_star, grid, d_hat, opts), opts.c_ell);
}

AdaptiveResult adaptive_estimate(const SampleSet& data, std::span<const double> x_star, const AdaptiveOptions& opts) {
    const std::vector<double> targets = data.flat_covariates(Origin::Target);
    AdaptiveResult res;
    res.dims = estimate_dim(PointView{targets, data.ambient_dim()}, opts.k, opts.dim_method);
    res.d_hat = res.dims.selected();
    res.grid = build_grid(data.size(), opts.beta_min, opts.beta_max);
    res.trace = lepski_select(data, x_star, res.grid, res.d_hat, opts.lepski);
    res.value = res.trace.final_value;
    return res;
}

}  // namespace covshift
