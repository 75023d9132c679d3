#pragma once

#include <span>
#include <string>
#include <vector>

#include "rocc/params.hpp"
#include "rocc/rng.hpp"
#include "rocc/tape.hpp"

namespace rocc {

enum class RnnCellKind { kVrnn, kLstm, kGru };

const char* cell_kind_name(RnnCellKind kind);
RnnCellKind cell_kind_from_name(const std::string& name);
int cell_gate_multiple(RnnCellKind kind);  // 1 / 4 / 3

// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)); biases are zero-initialized.
Tensor init_weight(int out, int in, Rng& rng);

// Registers a ParamSet entry on a tape, as a differentiable parameter leaf
// or as a constant (target networks, frozen critics).
Value reg_entry(Tape& tape, ParamSet& ps, int index, bool with_grad);

// ---------------------------------------------------------------------------
// Feedforward nets: `hidden_layers` ReLU layers then a linear head.
// Entries: W0,b0 .. W{L},b{L} where L = hidden_layers.
struct MlpSpec {
  int in = 0;
  int hidden = 256;
  int out = 1;
  int hidden_layers = 2;
};

void mlp_init(ParamSet& ps, const MlpSpec& spec, Rng& rng);

struct MlpRefs {
  std::vector<Value> W, b;
};
MlpRefs mlp_register(Tape& tape, ParamSet& ps, const MlpSpec& spec, bool with_grad);
Value mlp_forward(Tape& tape, const MlpRefs& refs, Value x);

// Convenience: register + forward without grad, returning the output tensor.
Tensor mlp_eval(const MlpSpec& spec, ParamSet& ps, const Tensor& x);

// ---------------------------------------------------------------------------
// Recurrent stacks. Weights per layer l (gate blocks fused row-wise):
//   l{l}.W_ih [G*h x in_l], l{l}.b_ih [G*h], l{l}.W_hh [G*h x h], l{l}.b_hh [G*h]
// Gate row order: LSTM (f,i,g,o), GRU (z,r,g).
struct RnnSpec {
  RnnCellKind kind = RnnCellKind::kLstm;
  int in = 0;
  int hidden = 256;
  int layers = 2;

  int layer_input(int layer) const { return layer == 0 ? in : hidden; }
};

void rnn_init(ParamSet& ps, const RnnSpec& spec, Rng& rng);

struct RnnLayerRefs {
  Value W_ih, b_ih, W_hh, b_hh;
};
struct RnnRefs {
  std::vector<RnnLayerRefs> layers;
};
RnnRefs rnn_register(Tape& tape, ParamSet& ps, const RnnSpec& spec, bool with_grad);

// One cell application. `c_prev` is used for LSTM only; the returned c is
// invalid for VRNN/GRU. Throws NumericError on non-finite inputs.
struct CellState {
  Value h;
  Value c;
};
CellState rnn_cell_step(Tape& tape, RnnCellKind kind, int hidden, Value x,
                        CellState prev, const RnnLayerRefs& w);

// Unrolls the full stack over xs (hidden state zero at t=0) and returns the
// top-layer hidden sequence. Registers one unroll instance on the tape's
// work counter. Throws UsageError for an empty sequence.
std::vector<Value> rnn_unroll(Tape& tape, const RnnRefs& refs, const RnnSpec& spec,
                              std::span<const Value> xs);

// ---------------------------------------------------------------------------
// Stateful single-step evaluation for acting. Holds per-layer hidden (and,
// for LSTM, cell) vectors as [1 x h] tensors, zeroed at episode start.
struct RnnState {
  std::vector<Tensor> h, c;
};
RnnState rnn_zero_state(const RnnSpec& spec);
// Advances the state by one input row [1 x in]; returns the top-layer hidden.
Tensor rnn_step(const RnnSpec& spec, ParamSet& ps, RnnState& state, const Tensor& x);

}  // namespace rocc
