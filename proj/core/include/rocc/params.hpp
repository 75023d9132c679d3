#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rocc/tensor.hpp"

namespace rocc {

// Named, ordered collection of learnable tensors with paired gradient and
// Adam moment buffers. Order is insertion order and is part of the contract
// (serialization, polyak pairing).
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor adam_m;
    Tensor adam_v;
  };

  int add(std::string name, Tensor init);
  int index_of(const std::string& name) const;  // -1 if absent
  Entry& entry(const std::string& name);
  const Entry& entry(const std::string& name) const;
  Entry& entry(int i) { return entries_[static_cast<size_t>(i)]; }
  const Entry& entry(int i) const { return entries_[static_cast<size_t>(i)]; }

  int size() const { return static_cast<int>(entries_.size()); }
  int64_t num_values() const;
  int64_t step_count() const { return step_count_; }

  void zero_grads();
  double grad_abs_max() const;

  // Exact structural copy of values only (grads/moments zeroed, step 0).
  ParamSet clone_values() const;
  void copy_values_from(const ParamSet& other);

  friend void adam_step(ParamSet& params, double lr);
  friend void polyak_update(ParamSet& target, const ParamSet& online, double rho);

 private:
  std::vector<Entry> entries_;
  int64_t step_count_ = 0;
};

// Standard Adam (beta1 0.9, beta2 0.999, eps 1e-8, bias correction).
// Applies one step using the accumulated gradients, then zeroes them.
// Throws NumericError if any gradient is non-finite.
void adam_step(ParamSet& params, double lr);

// target <- rho * target + (1 - rho) * online, entrywise over paired
// entries. Entry names and shapes must line up exactly.
void polyak_update(ParamSet& target, const ParamSet& online, double rho);

// Flat binary serialization of parameter values.
// Layout: magic "ROCP1", then per entry: name length (u32 LE), name bytes,
// rank (u32 LE), extents (u32 LE each), values (f64 LE).
void save_params(std::ostream& os, const ParamSet& params,
                 const std::string& name_prefix = "");
// Reads entries whose names carry `name_prefix`, strips it and stores them
// into matching entries of `params` (shape-checked). Entries present in the
// stream but not in `params` are skipped; missing ones raise StructuralError.
struct LoadedEntry {
  std::string name;
  Tensor value;
};
std::vector<LoadedEntry> read_param_file(std::istream& is);
void assign_params(ParamSet& params, const std::vector<LoadedEntry>& loaded,
                   const std::string& name_prefix = "");

}  // namespace rocc
