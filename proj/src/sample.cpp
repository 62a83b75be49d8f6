#include "covshift/sample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covshift/error.hpp"

namespace covshift {

SampleSet::SampleSet(std::size_t ambient_dim) : dim_(ambient_dim) {
    if (ambient_dim == 0) throw InputError("ambient dimension must be positive");
}

void SampleSet::reserve(std::size_t n) {
    x_.reserve(n * dim_);
    y_.reserve(n);
    origin_.reserve(n);
}

void SampleSet::add(std::span<const double> x, double y, Origin origin) {
    if (x.size() != dim_)
        throw InputError("sample has " + std::to_string(x.size()) + " coordinates, expected " +
                         std::to_string(dim_));
    if (!std::isfinite(y) || !std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); }))
        throw InputError("sample contains a non-finite value");
    x_.insert(x_.end(), x.begin(), x.end());
    y_.push_back(y);
    origin_.push_back(origin);
}

LabeledSample SampleSet::sample(std::size_t i) const {
    auto xi = x(i);
    return LabeledSample{{xi.begin(), xi.end()}, y_[i], origin_[i]};
}

std::size_t SampleSet::count(Origin o) const noexcept {
    return static_cast<std::size_t>(std::count(origin_.begin(), origin_.end(), o));
}

SampleSet SampleSet::subset(Origin o) const {
    SampleSet out(dim_);
    out.reserve(count(o));
    for (std::size_t i = 0; i < size(); ++i)
        if (origin_[i] == o) out.add(x(i), y_[i], o);
    return out;
}

std::vector<std::vector<double>> SampleSet::points(Origin o) const {
    std::vector<std::vector<double>> out;
    out.reserve(count(o));
    for (std::size_t i = 0; i < size(); ++i)
        if (origin_[i] == o) {
            auto xi = x(i);
            out.emplace_back(xi.begin(), xi.end());
        }
    return out;
}

std::vector<double> SampleSet::flat_covariates(Origin o) const {
    std::vector<double> out;
    out.reserve(count(o) * dim_);
    for (std::size_t i = 0; i < size(); ++i)
        if (origin_[i] == o) {
            auto xi = x(i);
            out.insert(out.end(), xi.begin(), xi.end());
        }
    return out;
}

}  // namespace covshift
