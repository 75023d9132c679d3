#include "rocc/layers.hpp"

#include <cmath>

namespace rocc {

const char* cell_kind_name(RnnCellKind kind) {
  switch (kind) {
    case RnnCellKind::kVrnn: return "vrnn";
    case RnnCellKind::kLstm: return "lstm";
    case RnnCellKind::kGru: return "gru";
  }
  return "?";
}

RnnCellKind cell_kind_from_name(const std::string& name) {
  if (name == "vrnn") return RnnCellKind::kVrnn;
  if (name == "lstm") return RnnCellKind::kLstm;
  if (name == "gru") return RnnCellKind::kGru;
  throw UsageError("unknown RNN cell kind '" + name + "'");
}

int cell_gate_multiple(RnnCellKind kind) {
  switch (kind) {
    case RnnCellKind::kVrnn: return 1;
    case RnnCellKind::kLstm: return 4;
    case RnnCellKind::kGru: return 3;
  }
  return 1;
}

Tensor init_weight(int out, int in, Rng& rng) {
  Tensor w({out, in});
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (int64_t i = 0; i < w.numel(); ++i) w[i] = rng.uniform(-bound, bound);
  return w;
}

Value reg_entry(Tape& tape, ParamSet& ps, int index, bool with_grad) {
  ParamSet::Entry& e = ps.entry(index);
  return with_grad ? tape.param(e.value, &e.grad) : tape.input(e.value);
}

// --- MLP --------------------------------------------------------------------

void mlp_init(ParamSet& ps, const MlpSpec& spec, Rng& rng) {
  int in = spec.in;
  for (int l = 0; l < spec.hidden_layers; ++l) {
    ps.add("W" + std::to_string(l), init_weight(spec.hidden, in, rng));
    ps.add("b" + std::to_string(l), Tensor({spec.hidden}));
    in = spec.hidden;
  }
  ps.add("W" + std::to_string(spec.hidden_layers), init_weight(spec.out, in, rng));
  ps.add("b" + std::to_string(spec.hidden_layers), Tensor({spec.out}));
}

MlpRefs mlp_register(Tape& tape, ParamSet& ps, const MlpSpec& spec, bool with_grad) {
  MlpRefs refs;
  for (int l = 0; l <= spec.hidden_layers; ++l) {
    refs.W.push_back(reg_entry(tape, ps, ps.index_of("W" + std::to_string(l)), with_grad));
    refs.b.push_back(reg_entry(tape, ps, ps.index_of("b" + std::to_string(l)), with_grad));
  }
  return refs;
}

Value mlp_forward(Tape& tape, const MlpRefs& refs, Value x) {
  const int layers = static_cast<int>(refs.W.size());
  Value h = x;
  for (int l = 0; l < layers - 1; ++l)
    h = tape.relu(tape.linear(h, refs.W[static_cast<size_t>(l)], refs.b[static_cast<size_t>(l)]));
  return tape.linear(h, refs.W.back(), refs.b.back());
}

Tensor mlp_eval(const MlpSpec& spec, ParamSet& ps, const Tensor& x) {
  Tape tape;
  MlpRefs refs = mlp_register(tape, ps, spec, false);
  Value y = mlp_forward(tape, refs, tape.input(x));
  return tape.value(y);
}

// --- Recurrent stacks --------------------------------------------------------

void rnn_init(ParamSet& ps, const RnnSpec& spec, Rng& rng) {
  const int g = cell_gate_multiple(spec.kind);
  for (int l = 0; l < spec.layers; ++l) {
    const std::string p = "l" + std::to_string(l) + ".";
    ps.add(p + "W_ih", init_weight(g * spec.hidden, spec.layer_input(l), rng));
    ps.add(p + "b_ih", Tensor({g * spec.hidden}));
    ps.add(p + "W_hh", init_weight(g * spec.hidden, spec.hidden, rng));
    ps.add(p + "b_hh", Tensor({g * spec.hidden}));
  }
}

RnnRefs rnn_register(Tape& tape, ParamSet& ps, const RnnSpec& spec, bool with_grad) {
  RnnRefs refs;
  for (int l = 0; l < spec.layers; ++l) {
    const std::string p = "l" + std::to_string(l) + ".";
    RnnLayerRefs r;
    r.W_ih = reg_entry(tape, ps, ps.index_of(p + "W_ih"), with_grad);
    r.b_ih = reg_entry(tape, ps, ps.index_of(p + "b_ih"), with_grad);
    r.W_hh = reg_entry(tape, ps, ps.index_of(p + "W_hh"), with_grad);
    r.b_hh = reg_entry(tape, ps, ps.index_of(p + "b_hh"), with_grad);
    refs.layers.push_back(r);
  }
  return refs;
}

CellState rnn_cell_step(Tape& tape, RnnCellKind kind, int hidden, Value x,
                        CellState prev, const RnnLayerRefs& w) {
  if (!tape.value(x).all_finite() || !tape.value(prev.h).all_finite())
    throw NumericError("rnn_cell_step: non-finite input");

  switch (kind) {
    case RnnCellKind::kVrnn: {
      Value pre = tape.add(tape.linear(x, w.W_ih, w.b_ih),
                           tape.linear(prev.h, w.W_hh, w.b_hh));
      return CellState{tape.tanh(pre), Value{}};
    }
    case RnnCellKind::kLstm: {
      if (!prev.c.valid() || !tape.value(prev.c).all_finite())
        throw NumericError("rnn_cell_step: bad LSTM cell state");
      Value pre = tape.add(tape.linear(x, w.W_ih, w.b_ih),
                           tape.linear(prev.h, w.W_hh, w.b_hh));
      Value f = tape.sigmoid(tape.slice_cols(pre, 0, hidden));
      Value i = tape.sigmoid(tape.slice_cols(pre, hidden, hidden));
      Value g = tape.tanh(tape.slice_cols(pre, 2 * hidden, hidden));
      Value o = tape.sigmoid(tape.slice_cols(pre, 3 * hidden, hidden));
      Value c = tape.add(tape.mul(f, prev.c), tape.mul(i, g));
      Value h = tape.mul(o, tape.tanh(c));
      return CellState{h, c};
    }
    case RnnCellKind::kGru: {
      Value px = tape.linear(x, w.W_ih, w.b_ih);
      Value ph = tape.linear(prev.h, w.W_hh, w.b_hh);
      Value z = tape.sigmoid(tape.add(tape.slice_cols(px, 0, hidden),
                                      tape.slice_cols(ph, 0, hidden)));
      Value r = tape.sigmoid(tape.add(tape.slice_cols(px, hidden, hidden),
                                      tape.slice_cols(ph, hidden, hidden)));
      Value g = tape.tanh(tape.add(tape.slice_cols(px, 2 * hidden, hidden),
                                   tape.mul(r, tape.slice_cols(ph, 2 * hidden, hidden))));
      // h = (1 - z) * g + z * h_prev
      Value h = tape.add(tape.mul(tape.affine(z, -1.0, 1.0), g), tape.mul(z, prev.h));
      return CellState{h, Value{}};
    }
  }
  throw UsageError("rnn_cell_step: bad cell kind");
}

std::vector<Value> rnn_unroll(Tape& tape, const RnnRefs& refs, const RnnSpec& spec,
                              std::span<const Value> xs) {
  if (xs.empty()) throw UsageError("rnn_unroll: empty sequence");
  const int batch = tape.value(xs[0]).rows();

  tape.begin_unroll();
  std::vector<CellState> states(static_cast<size_t>(spec.layers));
  for (int l = 0; l < spec.layers; ++l) {
    states[static_cast<size_t>(l)].h = tape.input(Tensor({batch, spec.hidden}));
    if (spec.kind == RnnCellKind::kLstm)
      states[static_cast<size_t>(l)].c = tape.input(Tensor({batch, spec.hidden}));
  }

  std::vector<Value> top;
  top.reserve(xs.size());
  for (const Value& x : xs) {
    Value layer_in = x;
    for (int l = 0; l < spec.layers; ++l) {
      CellState& st = states[static_cast<size_t>(l)];
      st = rnn_cell_step(tape, spec.kind, spec.hidden, layer_in, st,
                         refs.layers[static_cast<size_t>(l)]);
      layer_in = st.h;
    }
    top.push_back(layer_in);
  }
  tape.end_unroll();
  return top;
}

RnnState rnn_zero_state(const RnnSpec& spec) {
  RnnState s;
  for (int l = 0; l < spec.layers; ++l) {
    s.h.push_back(Tensor({1, spec.hidden}));
    if (spec.kind == RnnCellKind::kLstm) s.c.push_back(Tensor({1, spec.hidden}));
  }
  return s;
}

Tensor rnn_step(const RnnSpec& spec, ParamSet& ps, RnnState& state, const Tensor& x) {
  Tape tape;
  RnnRefs refs = rnn_register(tape, ps, spec, false);
  Value layer_in = tape.input(x);
  for (int l = 0; l < spec.layers; ++l) {
    CellState prev;
    prev.h = tape.input(state.h[static_cast<size_t>(l)]);
    if (spec.kind == RnnCellKind::kLstm)
      prev.c = tape.input(state.c[static_cast<size_t>(l)]);
    CellState next = rnn_cell_step(tape, spec.kind, spec.hidden, layer_in, prev,
                                   refs.layers[static_cast<size_t>(l)]);
    state.h[static_cast<size_t>(l)] = tape.value(next.h);
    if (spec.kind == RnnCellKind::kLstm)
      state.c[static_cast<size_t>(l)] = tape.value(next.c);
    layer_in = next.h;
  }
  return tape.value(layer_in);
}

}  // namespace rocc
