#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace speclearn::nn {

/// Dense row-major tensor of 64-bit floats.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(numel_of(shape), 0.0) {}
    Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != numel_of(shape))
            throw std::invalid_argument("tensor: data size does not match shape");
    }

    static size_t numel_of(const std::vector<int>& s) {
        size_t n = 1;
        for (int e : s) {
            if (e <= 0) throw std::invalid_argument("tensor: nonpositive extent");
            n *= static_cast<size_t>(e);
        }
        return n;
    }

    static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
    static Tensor full(std::vector<int> s, double v) {
        Tensor t(std::move(s));
        std::fill(t.data.begin(), t.data.end(), v);
        return t;
    }
    static Tensor scalar(double v) { return Tensor({1}, {v}); }

    size_t numel() const { return data.size(); }
    int dim(int i) const { return shape[static_cast<size_t>(i)]; }
    int ndim() const { return static_cast<int>(shape.size()); }

    double* ptr() { return data.data(); }
    const double* ptr() const { return data.data(); }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    std::string shape_str() const {
        std::string s = "[";
        for (size_t i = 0; i < shape.size(); ++i)
            s += (i ? "," : "") + std::to_string(shape[i]);
        return s + "]";
    }
};

inline void check_shape(const Tensor& t, const std::vector<int>& expect, const char* what) {
    if (t.shape != expect)
        throw std::invalid_argument(std::string(what) + ": unexpected shape " + t.shape_str());
}

}  // namespace speclearn::nn
