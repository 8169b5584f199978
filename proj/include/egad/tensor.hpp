#pragma once
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "egad/errors.hpp"

namespace egad {

// Dense row-major matrix of doubles. Vectors are represented as n x 1 or
// 1 x n as context requires; head stacks and per-layer lists are
// std::vector<Tensor>.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(size_t(r) * size_t(c), fill) {
        if (r < 0 || c < 0) throw DimensionError("negative tensor dimension");
    }

    static Tensor from(int r, int c, std::initializer_list<double> vals) {
        Tensor t(r, c);
        if (vals.size() != t.data.size()) throw DimensionError("initializer size mismatch");
        size_t i = 0;
        for (double v : vals) t.data[i++] = v;
        return t;
    }

    static Tensor row(std::initializer_list<double> vals) {
        return from(1, int(vals.size()), vals);
    }

    double& at(int r, int c) { return data[size_t(r) * cols + c]; }
    double at(int r, int c) const { return data[size_t(r) * cols + c]; }
    const double* row_ptr(int r) const { return data.data() + size_t(r) * cols; }
    double* row_ptr(int r) { return data.data() + size_t(r) * cols; }

    size_t size() const { return data.size(); }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    std::string shape_str() const {
        return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
    }

    bool operator==(const Tensor& o) const {
        return rows == o.rows && cols == o.cols && data == o.data;
    }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b))
        throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_str() +
                             " vs " + b.shape_str());
}

} // namespace egad
