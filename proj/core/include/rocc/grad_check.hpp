#pragma once

#include <functional>
#include <vector>

#include "rocc/params.hpp"

namespace rocc {

// Finite-difference verification of reverse-mode gradients.
//
// `eval(with_grad)` must rebuild the scalar loss from scratch using the
// current values of the given parameter sets and return it; when with_grad
// is true it must also run backward so gradients land in the sets' grad
// buffers. Any noise inside eval must be frozen (same draws every call).
//
// Returns max over all parameter elements of
//   |analytic - numeric| / max(|analytic|, |numeric|, 1e-8)
// with numeric = central difference of half-width fd_h.
double grad_check(const std::function<double(bool with_grad)>& eval,
                  const std::vector<ParamSet*>& sets, double fd_h = 1e-5);

}  // namespace rocc
