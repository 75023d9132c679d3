#include "rocc/grad_check.hpp"

#include <cmath>

namespace rocc {

double grad_check(const std::function<double(bool)>& eval,
                  const std::vector<ParamSet*>& sets, double fd_h) {
  for (ParamSet* ps : sets) ps->zero_grads();
  (void)eval(true);

  std::vector<std::vector<Tensor>> analytic;
  for (ParamSet* ps : sets) {
    std::vector<Tensor> grads;
    for (int i = 0; i < ps->size(); ++i) grads.push_back(ps->entry(i).grad);
    analytic.push_back(std::move(grads));
  }

  double max_rel = 0.0;
  for (size_t s = 0; s < sets.size(); ++s) {
    ParamSet& ps = *sets[s];
    for (int e = 0; e < ps.size(); ++e) {
      Tensor& v = ps.entry(e).value;
      for (int64_t i = 0; i < v.numel(); ++i) {
        const double saved = v[i];
        v[i] = saved + fd_h;
        const double up = eval(false);
        v[i] = saved - fd_h;
        const double dn = eval(false);
        v[i] = saved;
        const double numeric = (up - dn) / (2.0 * fd_h);
        const double a = analytic[s][static_cast<size_t>(e)][i];
        const double rel =
            std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-8});
        max_rel = std::max(max_rel, rel);
      }
    }
  }

  for (ParamSet* ps : sets) ps->zero_grads();
  return max_rel;
}

}  // namespace rocc
