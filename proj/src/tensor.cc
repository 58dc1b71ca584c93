#include "tagparse/tensor.h"

#include <cmath>

namespace tagparse {

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double squared_norm(const Gradients& grads) {
  double s = 0.0;
  for (const Tensor& g : grads) {
    for (double v : g.data) s += v * v;
  }
  return s;
}

}  // namespace tagparse
