#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rocc/tensor.hpp"

namespace rocc {

// Handle to a value recorded on a Tape.
struct Value {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Recurrent-work instrumentation. forward_unrolls counts full RNN unrolls
// over a sequence; bptt_passes counts (backward call, unroll) pairs, i.e.
// how many times some loss gradient traversed an unrolled RNN.
struct RnnWork {
  int forward_unrolls = 0;
  int bptt_passes = 0;
};

// Dynamic reverse-mode tape. Forward ops append records holding value ids;
// backward() walks the records once in strict reverse order and accumulates
// parameter gradients into the sinks registered via param().
//
// All shapes are checked at record time. Tensors of rank 1 act as rank-2
// rows where noted (the bias of linear()).
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves. input() carries no gradient; param() accumulates its gradient
  // into *grad_sink (shape must match) on every backward pass.
  Value input(Tensor v);
  Value param(const Tensor& v, Tensor* grad_sink);

  // y = x * W^T + b with x:[m x k], W:[n x k], b:[n] -> y:[m x n].
  Value linear(Value x, Value W, Value b);

  Value add(Value a, Value b);
  Value sub(Value a, Value b);
  Value mul(Value a, Value b);      // elementwise
  Value minimum(Value a, Value b);  // elementwise; ties propagate to a
  Value affine(Value a, double scale, double shift);
  Value clamp(Value a, double lo, double hi);
  Value tanh(Value a);
  Value sigmoid(Value a);
  Value relu(Value a);
  Value exp(Value a);
  Value log(Value a);
  Value concat_cols(Value a, Value b);           // [m x p],[m x q] -> [m x p+q]
  Value slice_cols(Value a, int start, int len);  // [m x n] -> [m x len]
  Value row_sum(Value a);                         // [m x n] -> [m x 1]
  Value sum_all(Value a);                         // -> [1]

  const Tensor& value(Value v) const;
  size_t num_records() const { return recs_.size(); }

  // Reverse pass seeded with d(root). The one-argument form requires a
  // scalar root and seeds with 1. Gradients of previous backward calls on
  // this tape are discarded; param sinks accumulate across calls.
  void backward(Value root);
  void backward(Value root, const Tensor& root_grad);

  // Recurrent-work accounting. Records created between begin_unroll() and
  // end_unroll() are tagged with one unroll instance; backward() reports
  // each traversed instance to the active counter. Counter may be null.
  void set_work_counter(RnnWork* w) { work_ = w; }
  RnnWork* work_counter() const { return work_; }
  int begin_unroll();
  void end_unroll();

 private:
  enum class Op : uint8_t {
    kInput, kParam, kLinear, kAdd, kSub, kMul, kMin, kAffine, kClamp,
    kTanh, kSigmoid, kRelu, kExp, kLog, kConcat, kSlice, kRowSum, kSumAll
  };

  struct Rec {
    Op op;
    int a = -1;
    int b = -1;
    int c = -1;
    int out = -1;
    int tag = -1;
    double s0 = 0.0;
    double s1 = 0.0;
  };

  Value push(Op op, Tensor out, int a = -1, int b = -1, int c = -1,
             double s0 = 0.0, double s1 = 0.0);
  const Tensor& val(Value v, const char* where) const;
  Tensor& grad_of(int id, const Shape& shape);

  std::vector<Rec> recs_;
  std::vector<Tensor> vals_;
  std::vector<Tensor> grads_;
  std::vector<std::pair<int, Tensor*>> sinks_;  // value id -> external grad
  RnnWork* work_ = nullptr;
  int cur_tag_ = -1;
  int next_tag_ = 0;
};

}  // namespace rocc
