#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace irisct {

/// Dense row-major matrix. The workhorse container for images, strips and
/// subbands; kept deliberately minimal (no expression templates, no views).
template <typename T>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<T> v;

    Mat() = default;
    Mat(int r, int c, T fill = T{}) : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}

    T& operator()(int r, int c) {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return v[static_cast<size_t>(r) * cols + c];
    }
    const T& operator()(int r, int c) const {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return v[static_cast<size_t>(r) * cols + c];
    }

    size_t size() const { return v.size(); }
    bool empty() const { return v.empty(); }
    bool same_dims(const Mat& o) const { return rows == o.rows && cols == o.cols; }

    bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && v == o.v; }
};

using MatD = Mat<double>;
using MatU8 = Mat<uint8_t>;
using MatI = Mat<int>;

inline double dot(const MatD& a, const MatD& b) {
    assert(a.same_dims(b));
    double s = 0;
    for (size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
    return s;
}

inline double sq_norm(const MatD& a) { return dot(a, a); }

} // namespace irisct
