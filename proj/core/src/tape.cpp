#include "rocc/tape.hpp"

#include <algorithm>
#include <cmath>

namespace rocc {

namespace {

// Dot product with an explicitly reordered (lane-blocked) accumulation so the
// compiler may vectorize the reduction. The lane order is fixed, so results
// are reproducible run to run for a given build.
inline double dot(const double* a, const double* b, int n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

inline void axpy(double s, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += s * x[i];
}

}  // namespace

Value Tape::push(Op op, Tensor out, int a, int b, int c, double s0, double s1) {
  const int id = static_cast<int>(vals_.size());
  vals_.push_back(std::move(out));
  recs_.push_back(Rec{op, a, b, c, id, cur_tag_, s0, s1});
  return Value{id};
}

const Tensor& Tape::val(Value v, const char* where) const {
  if (!v.valid() || v.id >= static_cast<int>(vals_.size()))
    throw UsageError(std::string(where) + ": value handle not on this tape");
  return vals_[static_cast<size_t>(v.id)];
}

const Tensor& Tape::value(Value v) const { return val(v, "Tape::value"); }

Value Tape::input(Tensor v) { return push(Op::kInput, std::move(v)); }

Value Tape::param(const Tensor& v, Tensor* grad_sink) {
  if (grad_sink == nullptr) throw UsageError("Tape::param: null gradient sink");
  if (!v.same_shape(*grad_sink))
    throw DimensionError("Tape::param: value/grad shape mismatch");
  Value out = push(Op::kParam, v);
  sinks_.emplace_back(out.id, grad_sink);
  return out;
}

Value Tape::linear(Value xv, Value Wv, Value bv) {
  const Tensor& x = val(xv, "linear");
  const Tensor& W = val(Wv, "linear");
  const Tensor& b = val(bv, "linear");
  if (x.rank() != 2 || W.rank() != 2)
    throw DimensionError("linear: x and W must be rank 2");
  if (b.rank() != 1) throw DimensionError("linear: b must be rank 1");
  const int m = x.rows(), k = x.cols(), n = W.rows();
  if (W.cols() != k)
    throw DimensionError("linear: inner extents differ, x " + x.shape_str() +
                         " vs W " + W.shape_str());
  if (b.extent(0) != n) throw DimensionError("linear: bias extent mismatch");

  Tensor y({m, n});
  for (int i = 0; i < m; ++i) {
    const double* xi = x.data() + static_cast<int64_t>(i) * k;
    double* yi = y.data() + static_cast<int64_t>(i) * n;
    for (int j = 0; j < n; ++j)
      yi[j] = dot(xi, W.data() + static_cast<int64_t>(j) * k, k) + b[j];
  }
  return push(Op::kLinear, std::move(y), xv.id, Wv.id, bv.id);
}

Value Tape::add(Value av, Value bv) {
  const Tensor& a = val(av, "add");
  const Tensor& b = val(bv, "add");
  check_same_shape(a, b, "add");
  Tensor y(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = a[i] + b[i];
  return push(Op::kAdd, std::move(y), av.id, bv.id);
}

Value Tape::sub(Value av, Value bv) {
  const Tensor& a = val(av, "sub");
  const Tensor& b = val(bv, "sub");
  check_same_shape(a, b, "sub");
  Tensor y(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = a[i] - b[i];
  return push(Op::kSub, std::move(y), av.id, bv.id);
}

Value Tape::mul(Value av, Value bv) {
  const Tensor& a = val(av, "mul");
  const Tensor& b = val(bv, "mul");
  check_same_shape(a, b, "mul");
  Tensor y(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = a[i] * b[i];
  return push(Op::kMul, std::move(y), av.id, bv.id);
}

Value Tape::minimum(Value av, Value bv) {
  const Tensor& a = val(av, "minimum");
  const Tensor& b = val(bv, "minimum");
  check_same_shape(a, b, "minimum");
  Tensor y(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = a[i] <= b[i] ? a[i] : b[i];
  return push(Op::kMin, std::move(y), av.id, bv.id);
}

Value Tape::affine(Value av, double scale, double shift) {
  const Tensor& a = val(av, "affine");
  Tensor y(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = scale * a[i] + shift;
  return push(Op::kAffine, std::move(y), av.id, -1, -1, scale, shift);
}

Value Tape::clamp(Value av, double lo, double hi) {
  const Tensor& a = val(av, "clamp");
  Tensor y(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = std::min(hi, std::max(lo, a[i]));
  return push(Op::kClamp, std::move(y), av.id, -1, -1, lo, hi);
}

Value Tape::tanh(Value av) {
  const Tensor& a = val(av, "tanh");
  Tensor y(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = std::tanh(a[i]);
  return push(Op::kTanh, std::move(y), av.id);
}

Value Tape::sigmoid(Value av) {
  const Tensor& a = val(av, "sigmoid");
  Tensor y(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = 1.0 / (1.0 + std::exp(-a[i]));
  return push(Op::kSigmoid, std::move(y), av.id);
}

Value Tape::relu(Value av) {
  const Tensor& a = val(av, "relu");
  Tensor y(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = a[i] > 0.0 ? a[i] : 0.0;
  return push(Op::kRelu, std::move(y), av.id);
}

Value Tape::exp(Value av) {
  const Tensor& a = val(av, "exp");
  Tensor y(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = std::exp(a[i]);
  return push(Op::kExp, std::move(y), av.id);
}

Value Tape::log(Value av) {
  const Tensor& a = val(av, "log");
  Tensor y(a.shape());
  for (int64_t i = 0; i < a.numel(); ++i) y[i] = std::log(a[i]);
  return push(Op::kLog, std::move(y), av.id);
}

Value Tape::concat_cols(Value av, Value bv) {
  const Tensor& a = val(av, "concat_cols");
  const Tensor& b = val(bv, "concat_cols");
  if (a.rank() != 2 || b.rank() != 2 || a.rows() != b.rows())
    throw DimensionError("concat_cols: need rank-2 operands with equal rows");
  const int m = a.rows(), p = a.cols(), q = b.cols();
  Tensor y({m, p + q});
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < p; ++j) y.at(i, j) = a.at(i, j);
    for (int j = 0; j < q; ++j) y.at(i, p + j) = b.at(i, j);
  }
  return push(Op::kConcat, std::move(y), av.id, bv.id);
}

Value Tape::slice_cols(Value av, int start, int len) {
  const Tensor& a = val(av, "slice_cols");
  if (a.rank() != 2) throw DimensionError("slice_cols: need rank-2 operand");
  if (start < 0 || len <= 0 || start + len > a.cols())
    throw DimensionError("slice_cols: range out of bounds");
  const int m = a.rows();
  Tensor y({m, len});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < len; ++j) y.at(i, j) = a.at(i, start + j);
  return push(Op::kSlice, std::move(y), av.id, -1, -1, start, len);
}

Value Tape::row_sum(Value av) {
  const Tensor& a = val(av, "row_sum");
  if (a.rank() != 2) throw DimensionError("row_sum: need rank-2 operand");
  const int m = a.rows(), n = a.cols();
  Tensor y({m, 1});
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += a.at(i, j);
    y.at(i, 0) = acc;
  }
  return push(Op::kRowSum, std::move(y), av.id);
}

Value Tape::sum_all(Value av) {
  const Tensor& a = val(av, "sum_all");
  double acc = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) acc += a[i];
  return push(Op::kSumAll, Tensor::scalar(acc), av.id);
}

int Tape::begin_unroll() {
  cur_tag_ = next_tag_++;
  if (work_ != nullptr) ++work_->forward_unrolls;
  return cur_tag_;
}

void Tape::end_unroll() { cur_tag_ = -1; }

Tensor& Tape::grad_of(int id, const Shape& shape) {
  Tensor& g = grads_[static_cast<size_t>(id)];
  if (g.empty()) g = Tensor(shape);
  return g;
}

void Tape::backward(Value root) {
  const Tensor& r = val(root, "backward");
  if (r.numel() != 1)
    throw UsageError("backward: seedless form requires a scalar root");
  backward(root, Tensor::full(r.shape(), 1.0));
}

void Tape::backward(Value root, const Tensor& root_grad) {
  if (recs_.empty()) throw UsageError("backward: tape is empty");
  const Tensor& r = val(root, "backward");
  if (!r.same_shape(root_grad))
    throw DimensionError("backward: seed shape does not match root");

  grads_.clear();
  grads_.resize(vals_.size());
  grads_[static_cast<size_t>(root.id)] = root_grad;

  std::vector<int> tags_seen;
  for (size_t ri = recs_.size(); ri-- > 0;) {
    const Rec& rec = recs_[ri];
    const Tensor& gy = grads_[static_cast<size_t>(rec.out)];
    if (gy.empty()) continue;

    if (rec.tag >= 0 &&
        std::find(tags_seen.begin(), tags_seen.end(), rec.tag) == tags_seen.end())
      tags_seen.push_back(rec.tag);

    switch (rec.op) {
      case Op::kInput:
        break;
      case Op::kParam:
        break;
      case Op::kLinear: {
        const Tensor& x = vals_[static_cast<size_t>(rec.a)];
        const Tensor& W = vals_[static_cast<size_t>(rec.b)];
        const int m = x.rows(), k = x.cols(), n = W.rows();
        Tensor& gx = grad_of(rec.a, x.shape());
        Tensor& gW = grad_of(rec.b, W.shape());
        Tensor& gb = grad_of(rec.c, vals_[static_cast<size_t>(rec.c)].shape());
        for (int i = 0; i < m; ++i) {
          const double* gyi = gy.data() + static_cast<int64_t>(i) * n;
          const double* xi = x.data() + static_cast<int64_t>(i) * k;
          double* gxi = gx.data() + static_cast<int64_t>(i) * k;
          for (int j = 0; j < n; ++j) {
            const double g = gyi[j];
            if (g == 0.0) continue;
            axpy(g, W.data() + static_cast<int64_t>(j) * k, gxi, k);
            axpy(g, xi, gW.data() + static_cast<int64_t>(j) * k, k);
            gb[j] += g;
          }
        }
        break;
      }
      case Op::kAdd: {
        Tensor& ga = grad_of(rec.a, gy.shape());
        Tensor& gb = grad_of(rec.b, gy.shape());
        for (int64_t i = 0; i < gy.numel(); ++i) {
          ga[i] += gy[i];
          gb[i] += gy[i];
        }
        break;
      }
      case Op::kSub: {
        Tensor& ga = grad_of(rec.a, gy.shape());
        Tensor& gb = grad_of(rec.b, gy.shape());
        for (int64_t i = 0; i < gy.numel(); ++i) {
          ga[i] += gy[i];
          gb[i] -= gy[i];
        }
        break;
      }
      case Op::kMul: {
        const Tensor& a = vals_[static_cast<size_t>(rec.a)];
        const Tensor& b = vals_[static_cast<size_t>(rec.b)];
        Tensor& ga = grad_of(rec.a, gy.shape());
        Tensor& gb = grad_of(rec.b, gy.shape());
        for (int64_t i = 0; i < gy.numel(); ++i) {
          ga[i] += gy[i] * b[i];
          gb[i] += gy[i] * a[i];
        }
        break;
      }
      case Op::kMin: {
        const Tensor& a = vals_[static_cast<size_t>(rec.a)];
        const Tensor& b = vals_[static_cast<size_t>(rec.b)];
        Tensor& ga = grad_of(rec.a, gy.shape());
        Tensor& gb = grad_of(rec.b, gy.shape());
        for (int64_t i = 0; i < gy.numel(); ++i) {
          if (a[i] <= b[i])
            ga[i] += gy[i];
          else
            gb[i] += gy[i];
        }
        break;
      }
      case Op::kAffine: {
        Tensor& ga = grad_of(rec.a, gy.shape());
        for (int64_t i = 0; i < gy.numel(); ++i) ga[i] += rec.s0 * gy[i];
        break;
      }
      case Op::kClamp: {
        const Tensor& a = vals_[static_cast<size_t>(rec.a)];
        Tensor& ga = grad_of(rec.a, gy.shape());
        for (int64_t i = 0; i < gy.numel(); ++i)
          if (a[i] >= rec.s0 && a[i] <= rec.s1) ga[i] += gy[i];
        break;
      }
      case Op::kTanh: {
        const Tensor& y = vals_[static_cast<size_t>(rec.out)];
        Tensor& ga = grad_of(rec.a, gy.shape());
        for (int64_t i = 0; i < gy.numel(); ++i) ga[i] += gy[i] * (1.0 - y[i] * y[i]);
        break;
      }
      case Op::kSigmoid: {
        const Tensor& y = vals_[static_cast<size_t>(rec.out)];
        Tensor& ga = grad_of(rec.a, gy.shape());
        for (int64_t i = 0; i < gy.numel(); ++i) ga[i] += gy[i] * y[i] * (1.0 - y[i]);
        break;
      }
      case Op::kRelu: {
        const Tensor& y = vals_[static_cast<size_t>(rec.out)];
        Tensor& ga = grad_of(rec.a, gy.shape());
        for (int64_t i = 0; i < gy.numel(); ++i)
          if (y[i] > 0.0) ga[i] += gy[i];
        break;
      }
      case Op::kExp: {
        const Tensor& y = vals_[static_cast<size_t>(rec.out)];
        Tensor& ga = grad_of(rec.a, gy.shape());
        for (int64_t i = 0; i < gy.numel(); ++i) ga[i] += gy[i] * y[i];
        break;
      }
      case Op::kLog: {
        const Tensor& a = vals_[static_cast<size_t>(rec.a)];
        Tensor& ga = grad_of(rec.a, gy.shape());
        for (int64_t i = 0; i < gy.numel(); ++i) ga[i] += gy[i] / a[i];
        break;
      }
      case Op::kConcat: {
        const Tensor& a = vals_[static_cast<size_t>(rec.a)];
        const Tensor& b = vals_[static_cast<size_t>(rec.b)];
        Tensor& ga = grad_of(rec.a, a.shape());
        Tensor& gb = grad_of(rec.b, b.shape());
        const int m = a.rows(), p = a.cols(), q = b.cols();
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < p; ++j) ga.at(i, j) += gy.at(i, j);
          for (int j = 0; j < q; ++j) gb.at(i, j) += gy.at(i, p + j);
        }
        break;
      }
      case Op::kSlice: {
        const Tensor& a = vals_[static_cast<size_t>(rec.a)];
        Tensor& ga = grad_of(rec.a, a.shape());
        const int m = a.rows();
        const int start = static_cast<int>(rec.s0), len = static_cast<int>(rec.s1);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < len; ++j) ga.at(i, start + j) += gy.at(i, j);
        break;
      }
      case Op::kRowSum: {
        const Tensor& a = vals_[static_cast<size_t>(rec.a)];
        Tensor& ga = grad_of(rec.a, a.shape());
        const int m = a.rows(), n = a.cols();
        for (int i = 0; i < m; ++i) {
          const double g = gy.at(i, 0);
          for (int j = 0; j < n; ++j) ga.at(i, j) += g;
        }
        break;
      }
      case Op::kSumAll: {
        const Tensor& a = vals_[static_cast<size_t>(rec.a)];
        Tensor& ga = grad_of(rec.a, a.shape());
        const double g = gy[0];
        for (int64_t i = 0; i < a.numel(); ++i) ga[i] += g;
        break;
      }
    }
  }

  for (const auto& [id, sink] : sinks_) {
    const Tensor& g = grads_[static_cast<size_t>(id)];
    if (g.empty()) continue;
    for (int64_t i = 0; i < g.numel(); ++i) (*sink)[i] += g[i];
  }

  if (work_ != nullptr) work_->bptt_passes += static_cast<int>(tags_seen.size());
}

}  // namespace rocc
