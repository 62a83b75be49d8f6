#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "covshift/sample.hpp"

namespace covshift {

/// Smooth map from the latent cube [-1, 1]^latent_dim into R^ambient_dim.
class Embedding {
public:
    virtual ~Embedding() = default;
    virtual int latent_dim() const = 0;
    virtual int ambient_dim() const = 0;
    virtual void map(std::span<const double> z, std::span<double> x) const = 0;

    std::vector<double> operator()(std::span<const double> z) const;
};

/// (z1, z2) -> ((z1+1)/2, (z2+1)/2, z1^2, z2^2, (z1+1)(z2+1)/4), a surface in [0, 1]^5.
class QuadraticSurfaceEmbedding final : public Embedding {
public:
    int latent_dim() const override { return 2; }
    int ambient_dim() const override { return 5; }
    void map(std::span<const double> z, std::span<double> x) const override;
};

enum class GeneratorKind {
    SameDim,         ///< source and target uniform on (different) boxes of R^D
    Manifold,        ///< target on the image of an embedding
    ApproxManifold,  ///< target = embedding + rho * Unif([-1, 1]^D)
};

GeneratorKind parse_generator_kind(std::string_view name);
std::string_view to_string(GeneratorKind kind);

/// Axis-aligned cube [lo, hi]^D.
struct CubeSupport {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(std::span<const double> x) const;
    double density(std::span<const double> x, std::size_t dim) const;
};

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::SameDim;
    int D = 5;
    int d = 5;
    std::size_t n_p = 0;
    std::size_t n_q = 0;
    double rho = 0.0;
    double beta_true = 2.5;
    std::vector<double> anchor;  ///< centre of the regression function
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
    CubeSupport source_support{0.0, 1.0};
    CubeSupport target_support{-0.5, 0.5};  ///< SameDim only
    std::shared_ptr<const Embedding> embedding;  ///< defaults to QuadraticSurfaceEmbedding

    void validate() const;
    const Embedding& embedding_or_default() const;
};

/// Stream ids of the generators' Philox streams.
enum class GeneratorStream : std::uint32_t {
    SourceCovariates = 0,
    SourceNoise = 1,
    TargetCovariates = 2,  ///< target box draws (SameDim) or latent coordinates
    TargetPerturbation = 3,
    TargetNoise = 4,
};

/// sum_j |x_j - anchor_j|^beta
double f_star(std::span<const double> x, std::span<const double> anchor, double beta);

SampleSet gen_samedim(const GeneratorSpec& spec);
SampleSet gen_manifold(const GeneratorSpec& spec);
SampleSet gen_approx_manifold(const GeneratorSpec& spec);
/// Dispatches on spec.kind.
SampleSet generate(const GeneratorSpec& spec);

/// Interior and target-only evaluation points of the same-dimension design.
std::vector<double> interior_point();
std::vector<double> exterior_point();
/// Latent point (-0.4248, 0.5766) and its image under the quadratic surface.
std::vector<double> manifold_latent_point();
std::vector<double> manifold_point();

}  // namespace covshift
