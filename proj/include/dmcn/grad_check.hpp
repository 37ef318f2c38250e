#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "dmcn/tensor.hpp"

namespace dmcn {

// Compares analytic gradients of a scalar-valued function against central
// finite differences.  Returns the max over all input elements of
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
//
// Run this at double precision; single precision drowns the differences in
// rounding noise.
inline double grad_check(
    const std::function<double(const std::vector<TensorD>&)>& f,
    std::vector<TensorD> inputs, const std::vector<TensorD>& analytic,
    double epsilon = 1e-5) {
  double worst = 0;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    for (std::size_t i = 0; i < inputs[t].data.size(); ++i) {
      const double saved = inputs[t].data[i];
      inputs[t].data[i] = saved + epsilon;
      const double fp = f(inputs);
      inputs[t].data[i] = saved - epsilon;
      const double fm = f(inputs);
      inputs[t].data[i] = saved;
      const double numeric = (fp - fm) / (2 * epsilon);
      const double a = analytic[t].data[i];
      const double rel = std::abs(a - numeric) /
                         std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace dmcn
