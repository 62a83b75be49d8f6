#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace covshift {

enum class Origin : unsigned char { Source, Target };

/// One labelled observation; `x` has the ambient dimension of its set.
struct LabeledSample {
    std::vector<double> x;
    double y = 0.0;
    Origin origin = Origin::Target;
};

/// Pooled source and target samples with a common ambient dimension.
///
/// Covariates are stored row-major in one contiguous buffer so the assembly
/// loops can stream through them.
class SampleSet {
public:
    SampleSet() = default;
    explicit SampleSet(std::size_t ambient_dim);

    void reserve(std::size_t n);
    void add(std::span<const double> x, double y, Origin origin);
    void add(const LabeledSample& s) { add(s.x, s.y, s.origin); }

    std::size_t size() const noexcept { return y_.size(); }
    bool empty() const noexcept { return y_.empty(); }
    std::size_t ambient_dim() const noexcept { return dim_; }

    std::span<const double> x(std::size_t i) const noexcept {
        return {x_.data() + i * dim_, dim_};
    }
    double y(std::size_t i) const noexcept { return y_[i]; }
    Origin origin(std::size_t i) const noexcept { return origin_[i]; }
    LabeledSample sample(std::size_t i) const;

    std::span<const double> covariates() const noexcept { return x_; }
    std::span<const double> responses() const noexcept { return y_; }

    std::size_t count(Origin o) const noexcept;
    std::size_t n_source() const noexcept { return count(Origin::Source); }
    std::size_t n_target() const noexcept { return count(Origin::Target); }

    /// Rows with the given origin, order preserved.
    SampleSet subset(Origin o) const;
    /// Covariates of the rows with the given origin, one vector per row.
    std::vector<std::vector<double>> points(Origin o) const;
    /// Same rows as points(o), flattened row-major.
    std::vector<double> flat_covariates(Origin o) const;

    void set_origin(std::size_t i, Origin o) { origin_[i] = o; }
    void set_y(std::size_t i, double y) { y_[i] = y; }

private:
    std::size_t dim_ = 0;
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<Origin> origin_;
};

}  // namespace covshift
