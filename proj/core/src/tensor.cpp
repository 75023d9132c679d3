#include "rocc/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace rocc {

namespace {

int64_t checked_numel(const Shape& shape) {
  int64_t n = 1;
  for (int e : shape) {
    if (e <= 0) throw DimensionError("tensor extents must be positive");
    n *= e;
  }
  return n;
}

}  // namespace

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  data_.assign(static_cast<size_t>(checked_numel(shape_)), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (checked_numel(shape_) != static_cast<int64_t>(data_.size()))
    throw DimensionError("tensor data length does not match shape " + shape_str());
}

Tensor Tensor::full(Shape shape, double v) {
  Tensor t(std::move(shape));
  t.fill(v);
  return t;
}

Tensor Tensor::row(std::initializer_list<double> vs) {
  return Tensor({1, static_cast<int>(vs.size())}, std::vector<double>(vs));
}

Tensor Tensor::vec(std::vector<double> vs) {
  const int n = static_cast<int>(vs.size());
  return Tensor({n}, std::move(vs));
}

void Tensor::fill(double v) {
  for (double& x : data_) x = v;
}

bool Tensor::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << 'x';
    os << shape_[i];
  }
  os << ']';
  return os.str();
}

int Tensor::throw_rank2() const {
  throw DimensionError("expected rank-2 tensor, got " + shape_str());
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* where) {
  if (!a.same_shape(b))
    throw DimensionError(std::string(where) + ": shape mismatch " + a.shape_str() +
                         " vs " + b.shape_str());
}

}  // namespace rocc
