#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace radar {

/// Row-major real array with an explicit shape.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> values;

    static Tensor zeros(std::vector<std::size_t> shape)
    {
        Tensor t{std::move(shape), {}};
        t.values.assign(t.element_count(), 0.0);
        return t;
    }

    std::size_t element_count() const
    {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    }
    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

} // namespace radar
