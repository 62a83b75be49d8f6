#include "covshift/synth.hpp"

#include <cmath>
#include <string>

#include "covshift/error.hpp"
#include "covshift/rng.hpp"

namespace covshift {

std::vector<double> Embedding::operator()(std::span<const double> z) const {
    std::vector<double> x(static_cast<std::size_t>(ambient_dim()));
    map(z, x);
    return x;
}

void QuadraticSurfaceEmbedding::map(std::span<const double> z, std::span<double> x) const {
    if (z.size() != 2 || x.size() != 5) throw InputError("quadratic surface maps R^2 to R^5");
    const double z1 = z[0];
    const double z2 = z[1];
    x[0] = (z1 + 1.0) / 2.0;
    x[1] = (z2 + 1.0) / 2.0;
    x[2] = z1 * z1;
    x[3] = z2 * z2;
    x[4] = (z1 + 1.0) * (z2 + 1.0) / 4.0;
}

GeneratorKind parse_generator_kind(std::string_view name) {
    if (name == "samedim") return GeneratorKind::SameDim;
    if (name == "manifold") return GeneratorKind::Manifold;
    if (name == "approx_manifold") return GeneratorKind::ApproxManifold;
    throw InputError("unknown generator kind '" + std::string(name) + "'");
}

std::string_view to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::SameDim:
            return "samedim";
        case GeneratorKind::Manifold:
            return "manifold";
        case GeneratorKind::ApproxManifold:
            return "approx_manifold";
    }
    return "?";
}

bool CubeSupport::contains(std::span<const double> x) const {
    for (double v : x)
        if (v < lo || v > hi) return false;
    return true;
}

double CubeSupport::density(std::span<const double> x, std::size_t dim) const {
    return contains(x) ? std::pow(hi - lo, -static_cast<double>(dim)) : 0.0;
}

const Embedding& GeneratorSpec::embedding_or_default() const {
    static const QuadraticSurfaceEmbedding fallback;
    return embedding ? *embedding : fallback;
}

void GeneratorSpec::validate() const {
    if (D < 1 || d < 1 || d > D) throw InputError("generator needs 1 <= d <= D");
    if (anchor.size() != static_cast<std::size_t>(D))
        throw InputError("generator anchor must have D = " + std::to_string(D) + " coordinates");
    if (!(beta_true > 0.0)) throw InputError("beta_true must be positive");
    if (!(noise_sd >= 0.0)) throw InputError("noise_sd must be non-negative");
    if (!(rho >= 0.0)) throw InputError("rho must be non-negative");
    if (!(source_support.hi > source_support.lo) || !(target_support.hi > target_support.lo))
        throw InputError("empty support cube");
    switch (kind) {
        case GeneratorKind::SameDim:
            if (d != D) throw InputError("same-dimension generator needs d == D");
            if (rho != 0.0) throw InputError("rho must be 0 unless kind is approx_manifold");
            break;
        case GeneratorKind::Manifold:
        case GeneratorKind::ApproxManifold: {
            if (kind == GeneratorKind::Manifold && rho != 0.0)
                throw InputError("rho must be 0 unless kind is approx_manifold");
            const Embedding& e = embedding_or_default();
            if (e.latent_dim() != d || e.ambient_dim() != D)
                throw InputError("embedding maps R^" + std::to_string(e.latent_dim()) + " to R^" +
                                 std::to_string(e.ambient_dim()) + ", spec has d = " + std::to_string(d) +
                                 ", D = " + std::to_string(D));
            break;
        }
    }
}

double f_star(std::span<const double> x, std::span<const double> anchor, double beta) {
    if (x.size() != anchor.size()) throw InputError("f_star: dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += std::pow(std::abs(x[j] - anchor[j]), beta);
    return s;
}

namespace {

RandomStream stream(const GeneratorSpec& spec, GeneratorStream id) {
    return RandomStream(spec.seed, static_cast<std::uint32_t>(id));
}

double response(const GeneratorSpec& spec, std::span<const double> x, RandomStream& noise) {
    const double eps = noise.normal();
    return f_star(x, spec.anchor, spec.beta_true) + spec.noise_sd * eps;
}

void add_source_rows(const GeneratorSpec& spec, SampleSet& out) {
    RandomStream xs = stream(spec, GeneratorStream::SourceCovariates);
    RandomStream ns = stream(spec, GeneratorStream::SourceNoise);
    std::vector<double> x(static_cast<std::size_t>(spec.D));
    for (std::size_t i = 0; i < spec.n_p; ++i) {
        for (auto& v : x) v = xs.uniform(spec.source_support.lo, spec.source_support.hi);
        out.add(x, response(spec, x, ns), Origin::Source);
    }
}

void add_manifold_targets(const GeneratorSpec& spec, double rho, SampleSet& out) {
    const Embedding& emb = spec.embedding_or_default();
    RandomStream zs = stream(spec, GeneratorStream::TargetCovariates);
    RandomStream us = stream(spec, GeneratorStream::TargetPerturbation);
    RandomStream ns = stream(spec, GeneratorStream::TargetNoise);
    std::vector<double> z(static_cast<std::size_t>(spec.d));
    std::vector<double> x(static_cast<std::size_t>(spec.D));
    for (std::size_t i = 0; i < spec.n_q; ++i) {
        for (auto& v : z) v = zs.uniform(-1.0, 1.0);
        emb.map(z, x);
        if (rho > 0.0)
            for (auto& v : x) v += rho * us.uniform(-1.0, 1.0);
        out.add(x, response(spec, x, ns), Origin::Target);
    }
}

}  // namespace

SampleSet gen_samedim(const GeneratorSpec& spec) {
    spec.validate();
    if (spec.kind != GeneratorKind::SameDim) throw InputError("gen_samedim needs kind samedim");
    SampleSet out(static_cast<std::size_t>(spec.D));
    out.reserve(spec.n_p + spec.n_q);
    add_source_rows(spec, out);
    RandomStream xs = stream(spec, GeneratorStream::TargetCovariates);
    RandomStream ns = stream(spec, GeneratorStream::TargetNoise);
    std::vector<double> x(static_cast<std::size_t>(spec.D));
    for (std::size_t i = 0; i < spec.n_q; ++i) {
        for (auto& v : x) v = xs.uniform(spec.target_support.lo, spec.target_support.hi);
        out.add(x, response(spec, x, ns), Origin::Target);
    }
    return out;
}

SampleSet gen_manifold(const GeneratorSpec& spec) {
    spec.validate();
    if (spec.kind != GeneratorKind::Manifold) throw InputError("gen_manifold needs kind manifold");
    SampleSet out(static_cast<std::size_t>(spec.D));
    out.reserve(spec.n_p + spec.n_q);
    add_source_rows(spec, out);
    add_manifold_targets(spec, 0.0, out);
    return out;
}

SampleSet gen_approx_manifold(const GeneratorSpec& spec) {
    spec.validate();
    if (spec.kind != GeneratorKind::ApproxManifold)
        throw InputError("gen_approx_manifold needs kind approx_manifold");
    SampleSet out(static_cast<std::size_t>(spec.D));
    out.reserve(spec.n_p + spec.n_q);
    add_source_rows(spec, out);
    add_manifold_targets(spec, spec.rho, out);
    return out;
}

SampleSet generate(const GeneratorSpec& spec) {
    switch (spec.kind) {
        case GeneratorKind::SameDim:
            return gen_samedim(spec);
        case GeneratorKind::Manifold:
            return gen_manifold(spec);
        case GeneratorKind::ApproxManifold:
            return gen_approx_manifold(spec);
    }
    throw InputError("unknown generator kind");
}

std::vector<double> interior_point() { return {0.2288, 0.2788, 0.2409, 0.2883, 0.2940}; }
std::vector<double> exterior_point() { return {0.7288, 0.7788, 0.7409, 0.7883, 0.7940}; }
std::vector<double> manifold_latent_point() { return {-0.4248, 0.5766}; }
std::vector<double> manifold_point() {
    return QuadraticSurfaceEmbedding{}(manifold_latent_point());
}

}  // namespace covshift
