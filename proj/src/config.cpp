#include "covshift/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "covshift/error.hpp"

namespace covshift {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!j.is_object()) throw DataError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw DataError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DataError(where + "." + key + ": " + e.what());
    }
}

template <class T>
void get_opt(const json& j, const char* key, T& out, const std::string& where) {
    if (j.contains(key)) out = get<T>(j, key, where);
}

json support_json(const CubeSupport& c) { return json::array({c.lo, c.hi}); }

CubeSupport support_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw DataError(where + ": expected [lo, hi]");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::string_view support_name(SupportShape s) { return s == SupportShape::Ball ? "ball" : "cube"; }

SupportShape parse_support(std::string_view s) {
    if (s == "ball") return SupportShape::Ball;
    if (s == "cube") return SupportShape::Cube;
    throw InputError("unknown kernel support '" + std::string(s) + "'");
}

// Enum parsers throw InputError; inside a spec file that is a data problem.
template <class F>
auto parse_field(F&& f, const std::string& where) -> decltype(f()) {
    try {
        return f();
    } catch (const InputError& e) {
        throw DataError(where + ": " + e.what());
    }
}

}  // namespace

SolveMode parse_solve_mode(std::string_view name) {
    if (name == "strict") return SolveMode::Strict;
    if (name == "min_norm") return SolveMode::MinNorm;
    throw InputError("unknown solve mode '" + std::string(name) + "' (expected strict or min_norm)");
}

std::string_view to_string(SolveMode m) { return m == SolveMode::Strict ? "strict" : "min_norm"; }

SlopeAxis parse_slope_axis(std::string_view name) {
    if (name == "n_Q") return SlopeAxis::TargetSize;
    if (name == "n_eff") return SlopeAxis::EffectiveSize;
    throw InputError("unknown slope axis '" + std::string(name) + "' (expected n_Q or n_eff)");
}

std::string_view to_string(SlopeAxis a) { return a == SlopeAxis::TargetSize ? "n_Q" : "n_eff"; }

json to_json(const GeneratorSpec& s) {
    return json{{"kind", to_string(s.kind)},
                {"D", s.D},
                {"d", s.d},
                {"n_P", s.n_p},
                {"n_Q", s.n_q},
                {"rho", s.rho},
                {"beta_true", s.beta_true},
                {"anchor", s.anchor},
                {"noise_sd", s.noise_sd},
                {"seed", s.seed},
                {"source_support", support_json(s.source_support)},
                {"target_support", support_json(s.target_support)}};
}

GeneratorSpec generator_from_json(const json& j) {
    const std::string w = "generator";
    reject_unknown(j,
                   {"kind", "D", "d", "n_P", "n_Q", "rho", "beta_true", "anchor", "noise_sd", "seed",
                    "source_support", "target_support"},
                   w);
    GeneratorSpec s;
    if (j.contains("kind"))
        s.kind = parse_field([&] { return parse_generator_kind(get<std::string>(j, "kind", w)); }, w + ".kind");
    get_opt(j, "D", s.D, w);
    s.d = s.kind == GeneratorKind::SameDim ? s.D : 2;
    get_opt(j, "d", s.d, w);
    get_opt(j, "n_P", s.n_p, w);
    get_opt(j, "n_Q", s.n_q, w);
    get_opt(j, "rho", s.rho, w);
    get_opt(j, "beta_true", s.beta_true, w);
    get_opt(j, "anchor", s.anchor, w);
    get_opt(j, "noise_sd", s.noise_sd, w);
    get_opt(j, "seed", s.seed, w);
    if (j.contains("source_support")) s.source_support = support_from(j["source_support"], w + ".source_support");
    if (j.contains("target_support")) s.target_support = support_from(j["target_support"], w + ".target_support");
    return s;
}

json to_json(const ExperimentSpec& s) {
    json sweep = json::array();
    for (const auto& p : s.sweep) sweep.push_back({{"n_P", p.n_p}, {"n_Q", p.n_q}, {"rho", p.rho}});
    json est = json::array();
    for (auto e : s.estimators) est.push_back(to_string(e));
    const auto& a = s.adaptive;
    return json{{"name", s.name},
                {"generator", to_json(s.generator)},
                {"sweep", sweep},
                {"estimators", est},
                {"replications", s.replications},
                {"x_star", s.x_star},
                {"beta_for_oracle", s.beta_for_oracle},
                {"d_for_oracle", s.d_for_oracle},
                {"base_seed", s.base_seed},
                {"kernel", {{"kind", to_string(s.kernel.kind)}, {"support", support_name(s.kernel.support)}}},
                {"solve", to_string(s.solve)},
                {"truncate", s.truncate},
                {"truncation_exponent", s.truncation_exponent},
                {"c4", s.c4},
                {"adaptive",
                 {{"k", a.k},
                  {"beta_min", a.beta_min},
                  {"beta_max", a.beta_max},
                  {"dim_method", to_string(a.dim_method)},
                  {"c_h", a.lepski.c_h},
                  {"c_ell", a.lepski.c_ell}}},
                {"slope_axis", to_string(s.slope_axis)}};
}

ExperimentSpec experiment_from_json(const json& j) {
    std::string w = "experiment";
    reject_unknown(j,
                   {"name", "generator", "sweep", "grid", "estimators", "replications", "x_star", "beta_for_oracle",
                    "d_for_oracle", "base_seed", "kernel", "solve", "truncate", "truncation_exponent", "c4",
                    "adaptive", "slope_axis"},
                   w);
    ExperimentSpec s;
    get_opt(j, "name", s.name, w);
    w += " '" + s.name + "'";
    if (j.contains("generator")) s.generator = generator_from_json(j["generator"]);
    s.d_for_oracle = s.generator.d;

    if (j.contains("sweep") && j.contains("grid")) throw DataError(w + ": give either sweep or grid, not both");
    if (j.contains("sweep")) {
        const json& sw = j["sweep"];
        if (!sw.is_array()) throw DataError(w + ".sweep: expected an array");
        for (const auto& p : sw) {
            reject_unknown(p, {"n_P", "n_Q", "rho"}, w + ".sweep");
            SweepPoint pt;
            get_opt(p, "n_P", pt.n_p, w + ".sweep");
            get_opt(p, "n_Q", pt.n_q, w + ".sweep");
            get_opt(p, "rho", pt.rho, w + ".sweep");
            s.sweep.push_back(pt);
        }
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        const std::string wg = w + ".grid";
        reject_unknown(g, {"n_P", "n_Q", "rho"}, wg);
        std::vector<std::size_t> nps{0}, nqs;
        std::vector<double> rhos{0.0};
        get_opt(g, "n_P", nps, wg);
        nqs = get<std::vector<std::size_t>>(g, "n_Q", wg);
        get_opt(g, "rho", rhos, wg);
        for (auto np : nps)
            for (double rho : rhos)
                for (auto nq : nqs) s.sweep.push_back({np, nq, rho});
    }
    if (j.contains("estimators")) {
        for (const auto& name : get<std::vector<std::string>>(j, "estimators", w))
            s.estimators.push_back(parse_field([&] { return parse_estimator_kind(name); }, w + ".estimators"));
    }
    get_opt(j, "replications", s.replications, w);
    if (j.contains("x_star")) {
        s.x_star = get<std::vector<double>>(j, "x_star", w);
    } else {
        s.x_star = s.generator.anchor;
    }
    if (s.generator.anchor.empty()) s.generator.anchor = s.x_star;
    get_opt(j, "beta_for_oracle", s.beta_for_oracle, w);
    get_opt(j, "d_for_oracle", s.d_for_oracle, w);
    get_opt(j, "base_seed", s.base_seed, w);
    if (j.contains("kernel")) {
        const json& k = j["kernel"];
        reject_unknown(k, {"kind", "support"}, w + ".kernel");
        if (k.contains("kind"))
            s.kernel.kind = parse_field([&] { return parse_kernel_kind(get<std::string>(k, "kind", w)); }, w);
        if (k.contains("support"))
            s.kernel.support = parse_field([&] { return parse_support(get<std::string>(k, "support", w)); }, w);
    }
    if (j.contains("solve"))
        s.solve = parse_field([&] { return parse_solve_mode(get<std::string>(j, "solve", w)); }, w);
    get_opt(j, "truncate", s.truncate, w);
    get_opt(j, "truncation_exponent", s.truncation_exponent, w);
    get_opt(j, "c4", s.c4, w);
    if (j.contains("adaptive")) {
        const json& a = j["adaptive"];
        const std::string wa = w + ".adaptive";
        reject_unknown(a, {"k", "beta_min", "beta_max", "dim_method", "c_h", "c_ell"}, wa);
        get_opt(a, "k", s.adaptive.k, wa);
        get_opt(a, "beta_min", s.adaptive.beta_min, wa);
        get_opt(a, "beta_max", s.adaptive.beta_max, wa);
        if (a.contains("dim_method"))
            s.adaptive.dim_method =
                parse_field([&] { return parse_dim_method(get<std::string>(a, "dim_method", wa)); }, wa);
        get_opt(a, "c_h", s.adaptive.lepski.c_h, wa);
        get_opt(a, "c_ell", s.adaptive.lepski.c_ell, wa);
    }
    if (j.contains("slope_axis"))
        s.slope_axis = parse_field([&] { return parse_slope_axis(get<std::string>(j, "slope_axis", w)); }, w);

    try {
        s.validate();
    } catch (const InputError& e) {
        throw DataError(w + ": " + e.what());
    }
    return s;
}

std::vector<ExperimentSpec> experiments_from_json(const json& j) {
    std::vector<ExperimentSpec> out;
    if (j.is_object() && j.contains("experiments")) {
        reject_unknown(j, {"experiments"}, "spec file");
        if (!j["experiments"].is_array()) throw DataError("spec file: experiments must be an array");
        for (const auto& e : j["experiments"]) out.push_back(experiment_from_json(e));
    } else {
        out.push_back(experiment_from_json(j));
    }
    if (out.empty()) throw DataError("spec file: no experiments");
    return out;
}

json parse_json_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string body, line;
    bool leading = true;
    while (std::getline(in, line)) {
        if (leading && !line.empty() && line[0] == '#') {
            body += '\n';
            continue;
        }
        leading = false;
        body += line;
        body += '\n';
    }
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw DataError(origin + ": " + e.what());
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

namespace {

const std::vector<std::size_t> kTargetSizes{100, 500, 1000, 2000, 5000, 10000, 20000, 50000, 100000};
const std::vector<std::size_t> kSourceSizes{100, 1000, 5000, 10000};

std::vector<SweepPoint> cross(const std::vector<std::size_t>& nps, const std::vector<std::size_t>& nqs) {
    std::vector<SweepPoint> out;
    for (auto np : nps)
        for (auto nq : nqs) out.push_back({np, nq, 0.0});
    return out;
}

ExperimentSpec samedim(std::string name, std::vector<double> x_star, bool swapped, std::uint64_t seed) {
    ExperimentSpec s;
    s.name = std::move(name);
    s.generator.kind = GeneratorKind::SameDim;
    s.generator.D = 5;
    s.generator.d = 5;
    s.generator.anchor = x_star;
    if (swapped) {
        s.generator.source_support = {-0.5, 0.5};
        s.generator.target_support = {0.0, 1.0};
    }
    s.x_star = std::move(x_star);
    s.sweep = cross(kSourceSizes, kTargetSizes);
    s.estimators = {EstimatorKind::PooledOracle, EstimatorKind::TargetOnlyOracle};
    s.d_for_oracle = 5;
    s.base_seed = seed;
    return s;
}

ExperimentSpec manifold(std::string name, std::uint64_t seed) {
    ExperimentSpec s;
    s.name = std::move(name);
    s.generator.kind = GeneratorKind::Manifold;
    s.generator.D = 5;
    s.generator.d = 2;
    s.x_star = manifold_point();
    s.generator.anchor = s.x_star;
    s.d_for_oracle = 2;
    s.base_seed = seed;
    return s;
}

}  // namespace

std::vector<std::string> bundled_spec_names() { return {"fig2_samedim", "fig3_manifold", "fig4_adaptive"}; }

std::vector<ExperimentSpec> bundled_experiments(std::string_view name) {
    if (name == "fig2_samedim")
        return {samedim("fig2_interior", interior_point(), false, 1000),
                samedim("fig2_exterior", exterior_point(), true, 2000)};
    if (name == "fig3_manifold") {
        ExperimentSpec s = manifold("fig3_manifold", 3000);
        s.sweep = cross(kSourceSizes, kTargetSizes);
        s.estimators = {EstimatorKind::PooledOracle, EstimatorKind::TargetOnlyOracle};
        return {s};
    }
    if (name == "fig4_adaptive") {
        ExperimentSpec s = manifold("fig4_adaptive", 4000);
        s.sweep = cross({5000}, {1000, 2000, 3000, 4000, 5000, 10000, 15000, 20000, 25000, 30000});
        s.estimators = {EstimatorKind::PooledOracle, EstimatorKind::TargetOnlyOracle, EstimatorKind::PooledAdaptive};
        return {s};
    }
    throw InputError("unknown bundled spec '" + std::string(name) + "'");
}

std::vector<ExperimentSpec> load_experiments(const std::string& name_or_path) {
    for (const auto& n : bundled_spec_names())
        if (n == name_or_path) return bundled_experiments(n);
    if (!std::filesystem::exists(name_or_path))
        throw InputError("'" + name_or_path + "' is neither a bundled spec nor an existing file");
    return experiments_from_json(read_json_file(name_or_path));
}

}  // namespace covshift
