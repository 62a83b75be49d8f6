#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "covshift/config.hpp"
#include "covshift/data_io.hpp"
#include "covshift/dim_est.hpp"
#include "covshift/error.hpp"
#include "covshift/harness.hpp"
#include "covshift/lepski.hpp"
#include "covshift/lpr.hpp"
#include "covshift/rates.hpp"
#include "covshift/synth.hpp"

namespace covshift::cli {

namespace {

using nlohmann::json;

constexpr double kDefaultTauExponent = 2.0;

struct Globals {
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool quiet = false;
};

struct EstimateOpts {
    std::string data;
    std::string x_star;
    double h = 0.0;
    int degree = 0;
    std::string kernel = "box";
    std::string support = "ball";
    std::string solver = "strict";
    bool truncate = false;
    int d = 0;
    double rho = 0.0;
    double tau_exponent = kDefaultTauExponent;
    double ridge = 0.0;
};

struct AdaptiveOpts {
    std::string data;
    std::string x_star;
    int k = 10;
    double beta_min = 1.0;
    double beta_max = 5.0;
    double c_h = 1.5;
    double c_ell = 0.5;
    std::string method = "avg";
    std::string kernel = "box";
    std::string solver = "min_norm";
    bool trace = false;
};

struct DimOpts {
    std::string data;
    int k = 10;
    std::string method = "avg";
};

struct RatesOpts {
    std::string config;
    std::string n_p, n_q, beta, d, D, rho;
    double c4 = 1.0;
    double boundary = 1.0;
};

struct SimulateOpts {
    std::string spec;
    std::string out;
};

struct BenchOpts {
    std::string spec;
    std::string out_dir = ".";
    bool fast = false;
};

KernelSpec make_kernel(const std::string& kind, const std::string& support) {
    KernelSpec k;
    k.kind = parse_kernel_kind(kind);
    if (support == "ball") {
        k.support = SupportShape::Ball;
    } else if (support == "cube") {
        k.support = SupportShape::Cube;
    } else {
        throw InputError("unknown kernel support '" + support + "'");
    }
    return k;
}

std::vector<double> parse_point(const std::string& text, std::size_t dim) {
    std::vector<double> v;
    try {
        v = parse_number_list(text);
    } catch (const InputError& e) {
        throw InputError(std::string("--x-star: ") + e.what());
    }
    if (v.size() != dim)
        throw InputError("--x-star has " + std::to_string(v.size()) + " coordinates, data has " + std::to_string(dim));
    return v;
}

int run_estimate(const EstimateOpts& o, std::ostream& out) {
    const SampleSet data = read_samples_csv_file(o.data);
    if (data.empty()) throw DataError(o.data + ": no samples");
    const auto x_star = parse_point(o.x_star, data.ambient_dim());
    LprConfig cfg;
    cfg.bandwidth = o.h;
    cfg.degree = o.degree;
    cfg.kernel = make_kernel(o.kernel, o.support);
    cfg.solve = parse_solve_mode(o.solver);
    cfg.ridge_epsilon = o.ridge;
    if (o.truncate) {
        const int D = static_cast<int>(data.ambient_dim());
        RegimeParams p{static_cast<double>(data.n_source()), static_cast<double>(data.n_target()), 1.0,
                       o.d > 0 ? o.d : D, D, o.rho};
        cfg.truncation = Truncation{tau_n(p, o.h, o.tau_exponent), psi_n(p, o.h)};
    }
    const LprFit fit = lpr_fit(data, x_star, cfg);
    out << json{{"value", fit.value},
                {"min_eigenvalue", fit.min_eigenvalue},
                {"truncated", fit.truncated},
                {"active_count", fit.active_count}}
               .dump()
        << '\n';
    return kOk;
}

int run_adaptive(const AdaptiveOpts& o, std::ostream& out) {
    const SampleSet data = read_samples_csv_file(o.data);
    if (data.empty()) throw DataError(o.data + ": no samples");
    const auto x_star = parse_point(o.x_star, data.ambient_dim());
    AdaptiveOptions opts;
    opts.k = o.k;
    opts.beta_min = o.beta_min;
    opts.beta_max = o.beta_max;
    opts.dim_method = parse_dim_method(o.method);
    opts.lepski.c_h = o.c_h;
    opts.lepski.c_ell = o.c_ell;
    opts.lepski.kernel = make_kernel(o.kernel, "ball");
    opts.lepski.solve = parse_solve_mode(o.solver);
    const AdaptiveResult r = adaptive_estimate(data, x_star, opts);
    json j{{"value", r.value},
           {"d_hat", r.d_hat},
           {"selected_beta", r.trace.selected_beta},
           {"selected_h", r.trace.selected_h}};
    if (o.trace) {
        json cands = json::array();
        for (const auto& c : r.trace.candidates) {
            json cj{{"beta", c.beta},     {"h", c.h},           {"degree", c.degree},
                    {"estimate", c.estimate}, {"fit_ok", c.fit_ok}, {"passed", c.passed}};
            if (c.first_violation)
                cj["first_violation"] = {{"eta", c.first_violation->eta},
                                         {"gap", c.first_violation->gap},
                                         {"threshold", c.first_violation->threshold}};
            cands.push_back(std::move(cj));
        }
        j["trace"] = std::move(cands);
    }
    out << j.dump() << '\n';
    return kOk;
}

int run_dim_est(const DimOpts& o, std::ostream& out) {
    const SampleSet data = read_samples_csv_file(o.data);
    const auto pts = data.flat_covariates(Origin::Target);
    if (pts.empty()) throw DataError(o.data + ": no target (Q) rows");
    const DimEstimate e = estimate_dim(PointView{pts, data.ambient_dim()}, o.k, parse_dim_method(o.method));
    out << json{{"d_avg", e.d_avg}, {"d_vote", e.d_vote}, {"histogram", e.histogram}}.dump() << '\n';
    return kOk;
}

std::vector<double> list_or(const std::string& flag, const std::string& text, const json& cfg, const char* key,
                            std::vector<double> fallback) {
    if (!text.empty()) {
        try {
            return parse_number_list(text);
        } catch (const InputError& e) {
            throw InputError(flag + ": " + e.what());
        }
    }
    if (cfg.contains(key)) {
        const json& v = cfg[key];
        try {
            if (v.is_number()) return {v.get<double>()};
            return v.get<std::vector<double>>();
        } catch (const json::exception&) {
            throw DataError(std::string("rates config: ") + key + " must be a number or a list of numbers");
        }
    }
    if (fallback.empty()) throw InputError(flag + " is required");
    return fallback;
}

int as_int(double v, const char* what) {
    if (v != std::floor(v)) throw InputError(std::string(what) + " must be an integer");
    return static_cast<int>(v);
}

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int run_rates(const RatesOpts& o, std::ostream& out) {
    json cfg = json::object();
    double c4 = o.c4;
    double boundary = o.boundary;
    if (!o.config.empty()) {
        cfg = read_json_file(o.config);
        if (!cfg.is_object()) throw DataError(o.config + ": expected an object");
        for (const auto& [key, _] : cfg.items())
            if (key != "n_P" && key != "n_Q" && key != "beta" && key != "d" && key != "D" && key != "rho" &&
                key != "C4" && key != "boundary_multiplier")
                throw DataError(o.config + ": unknown key '" + key + "'");
        if (cfg.contains("C4")) c4 = cfg["C4"].get<double>();
        if (cfg.contains("boundary_multiplier")) boundary = cfg["boundary_multiplier"].get<double>();
    }
    const auto nps = list_or("--n-P", o.n_p, cfg, "n_P", {0.0});
    const auto nqs = list_or("--n-Q", o.n_q, cfg, "n_Q", {});
    const auto betas = list_or("--beta", o.beta, cfg, "beta", {});
    const auto Ds = list_or("--D", o.D, cfg, "D", {});
    const auto ds = list_or("--d", o.d, cfg, "d", Ds);
    const auto rhos = list_or("--rho", o.rho, cfg, "rho", {0.0});

    std::vector<RegimeParams> grid;
    for (double np : nps)
        for (double nq : nqs)
            for (double b : betas)
                for (double d : ds)
                    for (double D : Ds)
                        for (double rho : rhos) {
                            RegimeParams p{np, nq, b, as_int(d, "d"), as_int(D, "D"), rho};
                            p.validate();
                            grid.push_back(p);
                        }

    out << "n_P,n_Q,beta,d,D,rho,regime,kappa_star,h_oracle,theoretical_rate\n";
    for (const auto& p : grid) {
        const OracleBandwidth ob = oracle_bandwidth(p, c4, boundary);
        out << g17(p.n_p) << ',' << g17(p.n_q) << ',' << g17(p.beta) << ',' << p.d << ',' << p.D << ','
            << g17(p.rho) << ',' << to_string(ob.label.regime) << ',' << g17(ob.label.kappa_star) << ','
            << g17(ob.h) << ',' << g17(theoretical_rate(p, boundary)) << '\n';
    }
    return kOk;
}

int run_simulate(const SimulateOpts& o, const Globals& g, std::ostream& out) {
    GeneratorSpec spec = generator_from_json(read_json_file(o.spec));
    if (g.seed_set) spec.seed = g.seed;
    try {
        spec.validate();
    } catch (const InputError& e) {
        throw DataError(o.spec + ": " + e.what());
    }
    const SampleSet data = generate(spec);
    json meta = to_json(spec);
    meta["target_perturbation"] = "uniform[-1,1]^D";
    write_samples_csv_file(o.out, data, meta.dump());
    out << json{{"out", o.out}, {"n_P", data.n_source()}, {"n_Q", data.n_target()}, {"seed", spec.seed}}.dump()
        << '\n';
    return kOk;
}

int run_bench(const BenchOpts& o, const Globals& g, std::ostream& out, std::ostream& err) {
    std::vector<ExperimentSpec> specs = load_experiments(o.spec);
    json files = json::array();
    for (auto& s : specs) {
        if (g.seed_set) s.base_seed = g.seed;
        if (o.fast) s.replications = std::min(s.replications, 25);
        if (!g.quiet) err << "running " << s.name << " (" << s.sweep.size() << " sweep points x " << s.replications
                          << " replications)\n";
        const McResult r = run_experiment(s);
        for (const auto& path : emit_results(r, s, o.out_dir)) files.push_back(path);
        if (!g.quiet)
            for (const auto& sl : r.slopes)
                err << "  slope " << to_string(sl.estimator) << " n_P=" << sl.n_p << ": " << sl.fit.slope
                    << " (r2 " << sl.fit.r2 << ")\n";
    }
    out << json{{"files", files}}.dump() << '\n';
    return kOk;
}

std::string version_text() {
    std::ostringstream s;
    s << "covshift " << kVersion << "\n"
      << "C_h = 1.5\nC_ell = 0.5\np = " << kDefaultTauExponent << "\nC4 = 1\nkernel = box (ball support)\n";
    return s.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Local polynomial regression under covariate shift", "covshift"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(0, 1);
    Globals g;
    bool version = false;
    app.add_flag("--version", version, "Print version and default constants");
    auto* seed_opt = app.add_option("--seed", g.seed, "Seed override for simulate / bench");
    app.add_option("--threads", g.threads, "Worker threads for bench (0 = OpenMP default)")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--quiet", g.quiet, "No progress output");

    EstimateOpts eo;
    auto* est = app.add_subcommand("estimate", "Local polynomial estimate at one point");
    est->add_option("--data", eo.data, "CSV with columns x_1..x_D,y,origin")->required();
    est->add_option("--x-star", eo.x_star, "Evaluation point, comma separated")->required();
    est->add_option("--h", eo.h, "Bandwidth")->required()->check(CLI::PositiveNumber);
    est->add_option("--degree", eo.degree, "Polynomial degree")->required()->check(CLI::Range(0, 6));
    est->add_option("--kernel", eo.kernel, "box or epa")->check(CLI::IsMember({"box", "epa", "epanechnikov"}));
    est->add_option("--support", eo.support, "ball or cube")->check(CLI::IsMember({"ball", "cube"}));
    est->add_option("--solver", eo.solver, "strict or min_norm")->check(CLI::IsMember({"strict", "min_norm"}));
    est->add_flag("--truncate,!--no-truncate", eo.truncate, "Eigenvalue truncation");
    est->add_option("--d", eo.d, "Intrinsic dimension for the truncation threshold (default D)")
        ->check(CLI::PositiveNumber);
    est->add_option("--rho", eo.rho, "Manifold noise level for the truncation threshold")
        ->check(CLI::NonNegativeNumber);
    est->add_option("--tau-exponent", eo.tau_exponent, "Exponent p of tau_n");
    est->add_option("--ridge", eo.ridge, "Diagonal jitter")->check(CLI::NonNegativeNumber);

    AdaptiveOpts ao;
    auto* ada = app.add_subcommand("adaptive", "Dimension and smoothness adaptive estimate");
    ada->add_option("--data", ao.data, "CSV with columns x_1..x_D,y,origin")->required();
    ada->add_option("--x-star", ao.x_star, "Evaluation point, comma separated")->required();
    ada->add_option("--k", ao.k, "Neighbours for the dimension estimate")->check(CLI::Range(2, 1 << 20));
    ada->add_option("--beta-min", ao.beta_min, "Smallest candidate smoothness")->check(CLI::PositiveNumber);
    ada->add_option("--beta-max", ao.beta_max, "Largest candidate smoothness")->check(CLI::PositiveNumber);
    ada->add_option("--C-h", ao.c_h, "Bandwidth constant")->check(CLI::PositiveNumber);
    ada->add_option("--C-ell", ao.c_ell, "Lepski threshold constant")->check(CLI::NonNegativeNumber);
    ada->add_option("--method", ao.method, "avg or vote")->check(CLI::IsMember({"avg", "vote"}));
    ada->add_option("--kernel", ao.kernel, "box or epa")->check(CLI::IsMember({"box", "epa", "epanechnikov"}));
    ada->add_option("--solver", ao.solver, "strict or min_norm")->check(CLI::IsMember({"strict", "min_norm"}));
    ada->add_flag("--trace", ao.trace, "Include every candidate in the output");

    DimOpts dopt;
    auto* dim = app.add_subcommand("dim-est", "Intrinsic dimension of the target covariates");
    dim->add_option("--data", dopt.data, "CSV; only origin Q rows are used")->required();
    dim->add_option("--k", dopt.k, "Neighbours")->check(CLI::Range(2, 1 << 20));
    dim->add_option("--method", dopt.method, "avg or vote")->check(CLI::IsMember({"avg", "vote"}));

    RatesOpts ro;
    auto* rates = app.add_subcommand("rates", "Regime, threshold, oracle bandwidth and rate on a parameter grid");
    rates->add_option("--config", ro.config, "JSON with lists n_P, n_Q, beta, d, D, rho");
    rates->add_option("--n-P", ro.n_p, "Source sizes, comma separated");
    rates->add_option("--n-Q", ro.n_q, "Target sizes");
    rates->add_option("--beta", ro.beta, "Smoothness values");
    rates->add_option("--d", ro.d, "Intrinsic dimensions (default D)");
    rates->add_option("--D", ro.D, "Ambient dimensions");
    rates->add_option("--rho", ro.rho, "Manifold noise levels");
    rates->add_option("--C4", ro.c4, "Bandwidth constant")->check(CLI::PositiveNumber);
    rates->add_option("--boundary-multiplier", ro.boundary, "Regime boundary at multiplier * kappa_star")
        ->check(CLI::PositiveNumber);

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "Draw one synthetic data set");
    sim->add_option("--spec", so.spec, "Generator spec (JSON)")->required();
    sim->add_option("--out", so.out, "Output CSV")->required();

    BenchOpts bo;
    auto* bench = app.add_subcommand("bench", "Monte Carlo experiments");
    bench->add_option("--spec", bo.spec, "Bundled name (fig2_samedim, fig3_manifold, fig4_adaptive) or JSON file")
        ->required();
    bench->add_option("--out-dir", bo.out_dir, "Directory for the CSV and JSON results");
    bench->add_flag("--fast", bo.fast, "At most 25 replications");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kUsage;
    }
    g.seed_set = seed_opt->count() > 0;

    if (version) {
        out << version_text();
        return kOk;
    }
    if (app.get_subcommands().empty()) {
        err << "error: a subcommand is required\n" << app.help();
        return kUsage;
    }
    if (g.threads > 0) omp_set_num_threads(g.threads);

    try {
        if (est->parsed()) return run_estimate(eo, out);
        if (ada->parsed()) return run_adaptive(ao, out);
        if (dim->parsed()) return run_dim_est(dopt, out);
        if (rates->parsed()) return run_rates(ro, out);
        if (sim->parsed()) return run_simulate(so, g, out);
        if (bench->parsed()) return run_bench(bo, g, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const NotAvailable& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}

}  // namespace covshift::cli
