#pragma once

#include <array>
#include <cstdint>

namespace covshift {

/// Philox4x32-10 counter-based bijection (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Sequential draws from one Philox stream.
///
/// Block b of stream s under seed k is philox(counter = {b_lo, b_hi, s, 0}, key = k).
/// Distinct stream ids give independent sequences, and the i-th draw of a stream
/// does not depend on how many draws other streams consumed, so generators can
/// assign one stream per quantity (covariates, noise, ...) and keep them aligned
/// across sample sizes and noise levels.
///
/// Transforms are written out here rather than taken from <random> so that
/// outputs are identical across standard libraries.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint32_t stream_id);

    std::uint32_t next_u32();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    /// Standard normal by the Box-Muller transform.
    double normal();

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace covshift
