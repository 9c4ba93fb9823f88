#pragma once

#include <cstddef>
#include <vector>

#include "lczmap/error.hpp"

namespace lcz {

/// Dense rank-3 array, rows x cols x channels, channels contiguous.
/// Templated on the scalar so the gradient-check path can run in double
/// while training and inference stay in float.
template <class T>
struct Tensor3T {
    int rows = 0, cols = 0, channels = 0;
    std::vector<T> v;

    Tensor3T() = default;
    Tensor3T(int r, int c, int ch) : rows(r), cols(c), channels(ch) {
        require(r > 0 && c > 0 && ch > 0, Errc::invalid, "tensor dims must be positive");
        v.assign(static_cast<std::size_t>(r) * c * ch, T(0));
    }

    std::size_t size() const { return v.size(); }

    std::size_t index(int i, int j, int c) const {
        return (static_cast<std::size_t>(i) * cols + j) * channels + c;
    }
    T at(int i, int j, int c) const { return v[index(i, j, c)]; }
    T& at(int i, int j, int c) { return v[index(i, j, c)]; }

    bool same_shape(const Tensor3T& o) const {
        return rows == o.rows && cols == o.cols && channels == o.channels;
    }

    template <class U>
    Tensor3T<U> cast() const {
        Tensor3T<U> out(rows, cols, channels);
        for (std::size_t i = 0; i < v.size(); ++i) out.v[i] = static_cast<U>(v[i]);
        return out;
    }
};

using Tensor3 = Tensor3T<float>;

} // namespace lcz
