#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "ldct/errors.hpp"

namespace ldct {

// Dense row-major tensor of doubles. Image layouts used across the toolkit:
//   {H, W}          plain 2D image
//   {C, H, W}       2D feature map
//   {C, D, H, W}    2.5D feature map (D = 3 slices)
class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape, double fill = 0.0)
        : shape_(std::move(shape)), data_(checked_numel(shape_), fill) {}
    Tensor(std::vector<int> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (static_cast<std::int64_t>(data_.size()) != checked_numel(shape_))
            throw ShapeMismatch("tensor data size does not match shape");
    }

    const std::vector<int>& shape() const { return shape_; }
    int dim(int i) const { return shape_.at(static_cast<std::size_t>(i)); }
    int ndim() const { return static_cast<int>(shape_.size()); }
    std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& vec() { return data_; }
    const std::vector<double>& vec() const { return data_; }

    double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    // {H,W} and {C,H,W} accessors for readable test/oracle code.
    double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * dim(1) + c]; }
    double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * dim(1) + c]; }
    double& at(int ch, int r, int c) {
        return data_[(static_cast<std::size_t>(ch) * dim(1) + r) * dim(2) + c];
    }
    double at(int ch, int r, int c) const {
        return data_[(static_cast<std::size_t>(ch) * dim(1) + r) * dim(2) + c];
    }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    static std::int64_t checked_numel(const std::vector<int>& shape) {
        std::int64_t n = 1;
        for (int d : shape) {
            if (d <= 0) throw ShapeMismatch("tensor dims must be positive");
            n *= d;
        }
        return n;
    }

  private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

// On-disk tensor container. Fixed layout, little-endian:
//   bytes 0..7   magic "LDCTTNSR"
//   u32          ndim
//   u32 * ndim   dims
//   u32          dtype code (0 = f32, 1 = f64)
//   payload      row-major flat array
enum class DType : std::uint32_t { f32 = 0, f64 = 1 };

inline constexpr char kTensorMagic[8] = {'L', 'D', 'C', 'T', 'T', 'N', 'S', 'R'};

void write_tensor(const Tensor& t, const std::string& path, DType dtype = DType::f64);
Tensor read_tensor(const std::string& path);

} // namespace ldct
