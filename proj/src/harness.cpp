#include "covshift/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "covshift/config.hpp"
#include "covshift/error.hpp"
#include "covshift/rates.hpp"

namespace covshift {

EstimatorKind parse_estimator_kind(std::string_view name) {
    if (name == "pooled_oracle") return EstimatorKind::PooledOracle;
    if (name == "target_only_oracle") return EstimatorKind::TargetOnlyOracle;
    if (name == "pooled_adaptive") return EstimatorKind::PooledAdaptive;
    throw InputError("unknown estimator '" + std::string(name) + "'");
}

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::PooledOracle:
            return "pooled_oracle";
        case EstimatorKind::TargetOnlyOracle:
            return "target_only_oracle";
        case EstimatorKind::PooledAdaptive:
            return "pooled_adaptive";
    }
    return "?";
}

void ExperimentSpec::validate() const {
    if (replications < 1) throw InputError("replications must be at least 1");
    if (estimators.empty()) throw InputError("experiment needs at least one estimator");
    if (x_star.size() != static_cast<std::size_t>(generator.D))
        throw InputError("x_star must have D = " + std::to_string(generator.D) + " coordinates");
    if (!(beta_for_oracle > 0.0)) throw InputError("beta_for_oracle must be positive");
    if (d_for_oracle < 1 || d_for_oracle > generator.D) throw InputError("d_for_oracle must lie in [1, D]");
    for (const auto& p : sweep) {
        if (p.n_p + p.n_q == 0) throw InputError("sweep point with no samples");
        if (!(p.rho >= 0.0)) throw InputError("sweep rho must be non-negative");
        if (p.rho != 0.0 && generator.kind != GeneratorKind::ApproxManifold)
            throw InputError("sweep rho must be 0 unless kind is approx_manifold");
    }
    GeneratorSpec g = generator;
    g.rho = generator.kind == GeneratorKind::ApproxManifold ? 0.0 : g.rho;
    g.validate();
}

const CellResult& McResult::cell(EstimatorKind e, std::size_t n_p, std::size_t n_q, double rho) const {
    for (const auto& c : cells)
        if (c.estimator == e && c.point.n_p == n_p && c.point.n_q == n_q && c.point.rho == rho) return c;
    throw InputError("no result cell for " + std::string(to_string(e)) + " at n_P = " + std::to_string(n_p) +
                     ", n_Q = " + std::to_string(n_q));
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw InputError("slope fit needs at least 3 points");
    const auto m = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [n, v] : points) {
        if (!(n > 0.0) || !(v > 0.0)) throw InputError("slope fit needs positive sizes and errors");
        sx += std::log(n);
        sy += std::log(v);
    }
    const double mx = sx / m;
    const double my = sy / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [n, v] : points) {
        const double dx = std::log(n) - mx;
        const double dy = std::log(v) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw InputError("slope fit needs at least two distinct sizes");
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    const double sse = std::max(0.0, syy - f.slope * sxy);
    f.stderr_slope = m > 2.0 ? std::sqrt(sse / (m - 2.0) / sxx) : 0.0;
    f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return f;
}

OracleBandwidths oracle_bandwidths(const ExperimentSpec& spec, const SweepPoint& point) {
    const auto& g = spec.generator;
    const double n_p = static_cast<double>(point.n_p);
    const double n_q = static_cast<double>(point.n_q);
    const double beta = spec.beta_for_oracle;
    const int d = spec.d_for_oracle;
    OracleBandwidths out;
    if (g.kind == GeneratorKind::SameDim) {
        const auto D = static_cast<std::size_t>(g.D);
        const double p = g.source_support.density(spec.x_star, D);
        const double q = g.target_support.density(spec.x_star, D);
        const double n = n_p + n_q;
        const double mix = n > 0.0 ? (n_p * p + n_q * q) / n : 0.0;
        if (mix > 0.0) out.pooled = sim_bandwidth_samedim(n, mix, beta, d);
        if (n_q > 0.0 && q > 0.0) out.target_only = sim_bandwidth_samedim(n_q, q, beta, d);
        return out;
    }
    out.pooled = oracle_bandwidth(RegimeParams{n_p, n_q, beta, d, g.D, point.rho}, spec.c4).h;
    if (n_q >= 1.0) out.target_only = oracle_bandwidth(RegimeParams{0.0, n_q, beta, d, g.D, point.rho}, spec.c4).h;
    return out;
}

namespace {

struct Outcome {
    double value = 0.0;
    bool failed = false;
    double selected_beta = 0.0;
    int d_hat = 0;
};

Outcome oracle_fit(const SampleSet& data, const ExperimentSpec& spec, double h, std::size_t n_p, std::size_t n_q,
                   double rho) {
    Outcome o;
    if (!(h > 0.0) || data.empty()) {
        o.failed = true;
        return o;
    }
    LprConfig cfg;
    cfg.bandwidth = h;
    cfg.degree = static_cast<int>(std::floor(spec.beta_for_oracle + 1e-9));
    cfg.kernel = spec.kernel;
    cfg.solve = spec.solve;
    if (spec.truncate) {
        const RegimeParams p{static_cast<double>(n_p), static_cast<double>(n_q), spec.beta_for_oracle,
                             spec.d_for_oracle, spec.generator.D, rho};
        cfg.truncation = Truncation{tau_n(p, h, spec.truncation_exponent), psi_n(p, h)};
    }
    try {
        const LprFit fit = lpr_fit(data, spec.x_star, cfg);
        o.value = fit.value;
        o.failed = !fit.truncated && fit.rank == 0;
    } catch (const NumericalError&) {
        o.value = 0.0;
        o.failed = true;
    }
    if (!std::isfinite(o.value)) {
        o.value = 0.0;
        o.failed = true;
    }
    return o;
}

Outcome adaptive_fit(const SampleSet& data, const ExperimentSpec& spec) {
    Outcome o;
    try {
        AdaptiveOptions opts = spec.adaptive;
        opts.lepski.kernel = spec.kernel;
        opts.lepski.solve = spec.solve;
        opts.lepski.truncate = spec.truncate;
        opts.lepski.truncation_exponent = spec.truncation_exponent;
        const AdaptiveResult r = adaptive_estimate(data, spec.x_star, opts);
        o.value = r.value;
        o.selected_beta = r.trace.selected_beta;
        o.d_hat = r.d_hat;
    } catch (const NumericalError&) {
        o.failed = true;
    } catch (const InputError&) {
        o.failed = true;
    }
    if (!std::isfinite(o.value)) {
        o.value = 0.0;
        o.failed = true;
    }
    return o;
}

double quantile(std::vector<double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void summarise(CellResult& c) {
    const auto& e = c.squared_errors;
    const auto r = static_cast<double>(e.size());
    c.replications = static_cast<int>(e.size());
    if (e.empty()) return;
    double sum = 0.0;
    for (double v : e) sum += v;
    c.mse = sum / r;
    double ss = 0.0;
    for (double v : e) ss += (v - c.mse) * (v - c.mse);
    c.se = e.size() > 1 ? std::sqrt(ss / (r - 1.0) / r) : 0.0;
    std::vector<double> sorted = e;
    std::sort(sorted.begin(), sorted.end());
    c.median = quantile(sorted, 0.5);
    c.q25 = quantile(sorted, 0.25);
    c.q75 = quantile(sorted, 0.75);
}

std::vector<SlopeRecord> fit_slopes(const ExperimentSpec& spec, const std::vector<CellResult>& cells) {
    std::map<std::tuple<int, std::size_t, double>, std::vector<std::pair<double, double>>> groups;
    for (const auto& c : cells) {
        double x = static_cast<double>(c.point.n_q);
        if (spec.slope_axis == SlopeAxis::EffectiveSize && c.estimator != EstimatorKind::TargetOnlyOracle) {
            const RegimeParams p{static_cast<double>(c.point.n_p), static_cast<double>(c.point.n_q),
                                 spec.beta_for_oracle, spec.d_for_oracle, spec.generator.D, 0.0};
            x = kappa_star(p).n_eff;
        }
        groups[{static_cast<int>(c.estimator), c.point.n_p, c.point.rho}].emplace_back(x, c.mse);
    }
    std::vector<SlopeRecord> out;
    for (const auto& [key, pts] : groups) {
        std::vector<double> xs;
        for (const auto& p : pts) xs.push_back(p.first);
        std::sort(xs.begin(), xs.end());
        const bool distinct = std::adjacent_find(xs.begin(), xs.end()) == xs.end();
        const bool positive = std::all_of(pts.begin(), pts.end(), [](const auto& p) { return p.second > 0.0; });
        if (pts.size() < 3 || !distinct || !positive) continue;
        SlopeRecord rec;
        rec.estimator = static_cast<EstimatorKind>(std::get<0>(key));
        rec.n_p = std::get<1>(key);
        rec.rho = std::get<2>(key);
        rec.fit = fit_slope(pts);
        out.push_back(rec);
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

McResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const std::size_t n_points = spec.sweep.size();
    const std::size_t n_est = spec.estimators.size();
    const auto reps = static_cast<std::size_t>(spec.replications);

    std::vector<OracleBandwidths> bandwidths;
    bandwidths.reserve(n_points);
    for (const auto& p : spec.sweep) bandwidths.push_back(oracle_bandwidths(spec, p));

    // outcomes[(point * n_est + est) * reps + rep]
    std::vector<Outcome> outcomes(n_points * n_est * reps);
    std::vector<double> truth(n_points * reps, 0.0);
    const auto tasks = static_cast<std::ptrdiff_t>(n_points * reps);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < tasks; ++t) {
        const std::size_t pi = static_cast<std::size_t>(t) / reps;
        const std::size_t rep = static_cast<std::size_t>(t) % reps;
        const SweepPoint& point = spec.sweep[pi];

        GeneratorSpec g = spec.generator;
        g.n_p = point.n_p;
        g.n_q = point.n_q;
        g.rho = point.rho;
        g.seed = spec.base_seed + rep;
        const SampleSet data = generate(g);
        truth[t] = f_star(spec.x_star, g.anchor, g.beta_true);

        std::optional<SampleSet> targets;
        for (std::size_t e = 0; e < n_est; ++e) {
            Outcome o;
            switch (spec.estimators[e]) {
                case EstimatorKind::PooledOracle:
                    o = oracle_fit(data, spec, bandwidths[pi].pooled, point.n_p, point.n_q, point.rho);
                    break;
                case EstimatorKind::TargetOnlyOracle:
                    if (!targets) targets = data.subset(Origin::Target);
                    o = oracle_fit(*targets, spec, bandwidths[pi].target_only, 0, point.n_q, point.rho);
                    break;
                case EstimatorKind::PooledAdaptive:
                    o = adaptive_fit(data, spec);
                    break;
            }
            outcomes[(pi * n_est + e) * reps + rep] = o;
        }
    }

    McResult result;
    result.experiment = spec.name;
    for (std::size_t pi = 0; pi < n_points; ++pi) {
        for (std::size_t e = 0; e < n_est; ++e) {
            CellResult c;
            c.estimator = spec.estimators[e];
            c.point = spec.sweep[pi];
            c.bandwidth = c.estimator == EstimatorKind::PooledOracle       ? bandwidths[pi].pooled
                          : c.estimator == EstimatorKind::TargetOnlyOracle ? bandwidths[pi].target_only
                                                                           : 0.0;
            c.squared_errors.reserve(reps);
            double beta_sum = 0.0, d_sum = 0.0;
            int ok = 0;
            for (std::size_t rep = 0; rep < reps; ++rep) {
                const Outcome& o = outcomes[(pi * n_est + e) * reps + rep];
                const double err = o.value - truth[pi * reps + rep];
                c.squared_errors.push_back(err * err);
                if (o.failed) {
                    ++c.n_failures;
                } else {
                    beta_sum += o.selected_beta;
                    d_sum += o.d_hat;
                    ++ok;
                }
            }
            if (c.estimator == EstimatorKind::PooledAdaptive && ok > 0) {
                c.mean_selected_beta = beta_sum / ok;
                c.mean_d_hat = d_sum / ok;
            }
            summarise(c);
            result.cells.push_back(std::move(c));
        }
    }
    result.slopes = fit_slopes(spec, result.cells);
    return result;
}

void write_results_csv(std::ostream& out, const McResult& result) {
    out << "experiment,estimator,n_P,n_Q,rho,mse,se,median,q25,q75,n_failures\n";
    for (const auto& c : result.cells) {
        out << result.experiment << ',' << to_string(c.estimator) << ',' << c.point.n_p << ',' << c.point.n_q << ','
            << format_double(c.point.rho) << ',' << format_double(c.mse) << ',' << format_double(c.se) << ','
            << format_double(c.median) << ',' << format_double(c.q25) << ',' << format_double(c.q75) << ','
            << c.n_failures << '\n';
    }
}

std::vector<CellResult> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("experiment,estimator,", 0) != 0)
        throw DataError("results CSV: missing header");
    std::vector<CellResult> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 11) throw DataError("results CSV line " + std::to_string(line_no) + ": expected 11 fields");
        try {
            CellResult c;
            c.estimator = parse_estimator_kind(f[1]);
            c.point = {std::stoull(f[2]), std::stoull(f[3]), std::stod(f[4])};
            c.mse = std::stod(f[5]);
            c.se = std::stod(f[6]);
            c.median = std::stod(f[7]);
            c.q25 = std::stod(f[8]);
            c.q75 = std::stod(f[9]);
            c.n_failures = std::stoi(f[10]);
            out.push_back(std::move(c));
        } catch (const std::exception& e) {
            throw DataError("results CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<std::string> emit_results(const McResult& result, const ExperimentSpec& spec, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());

    const std::string csv_path = (fs::path(dir) / (result.experiment + ".csv")).string();
    const std::string json_path = (fs::path(dir) / (result.experiment + ".json")).string();
    {
        std::ofstream out(csv_path);
        if (!out) throw DataError("cannot write '" + csv_path + "'");
        write_results_csv(out, result);
        if (!out) throw DataError("write to '" + csv_path + "' failed");
    }

    nlohmann::json j;
    j["experiment"] = result.experiment;
    j["spec"] = to_json(spec);
    j["base_seed"] = spec.base_seed;
    auto& cells = j["cells"] = nlohmann::json::array();
    for (const auto& c : result.cells) {
        nlohmann::json cj{{"estimator", to_string(c.estimator)},
                          {"n_P", c.point.n_p},
                          {"n_Q", c.point.n_q},
                          {"rho", c.point.rho},
                          {"bandwidth", c.bandwidth},
                          {"mse", c.mse},
                          {"se", c.se},
                          {"median", c.median},
                          {"q25", c.q25},
                          {"q75", c.q75},
                          {"n_failures", c.n_failures},
                          {"replications", c.replications}};
        if (c.estimator == EstimatorKind::PooledAdaptive) {
            cj["mean_selected_beta"] = c.mean_selected_beta;
            cj["mean_d_hat"] = c.mean_d_hat;
        }
        cells.push_back(std::move(cj));
    }
    auto& slopes = j["slopes"] = nlohmann::json::array();
    for (const auto& s : result.slopes)
        slopes.push_back({{"estimator", to_string(s.estimator)},
                          {"n_P", s.n_p},
                          {"rho", s.rho},
                          {"slope", s.fit.slope},
                          {"stderr", s.fit.stderr_slope},
                          {"r2", s.fit.r2}});
    {
        std::ofstream out(json_path);
        if (!out) throw DataError("cannot write '" + json_path + "'");
        out << j.dump(2) << '\n';
        if (!out) throw DataError("write to '" + json_path + "' failed");
    }
    return {csv_path, json_path};
}

}  // namespace covshift
