#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "rocc/errors.hpp"

namespace rocc {

using Shape = std::vector<int>;

// Dense row-major array of f64. The only numeric carrier in the project;
// rank is 1..3 in practice (vectors, batch matrices, padded sequences).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);                       // zero-filled
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor full(Shape shape, double v);
  static Tensor scalar(double v) { return Tensor({1}, {v}); }
  static Tensor row(std::initializer_list<double> vs);        // [1 x n]
  static Tensor vec(std::vector<double> vs);                   // [n]

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int64_t numel() const { return static_cast<int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  int extent(int axis) const { return shape_[static_cast<size_t>(axis)]; }
  int rows() const { return shape_.size() == 2 ? shape_[0] : throw_rank2(); }
  int cols() const { return shape_.size() == 2 ? shape_[1] : throw_rank2(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  double& at(int i, int j) { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
  double at(int i, int j) const { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
  double& at(int i, int j, int k) {
    return data_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  double at(int i, int j, int k) const {
    return data_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }

  void fill(double v);
  bool all_finite() const;
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  std::string shape_str() const;

 private:
  [[noreturn]] int throw_rank2() const;

  Shape shape_;
  std::vector<double> data_;
};

// Throws DimensionError unless the two tensors have identical shapes.
void check_same_shape(const Tensor& a, const Tensor& b, const char* where);

}  // namespace rocc
