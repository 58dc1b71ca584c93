#ifndef TAGPARSE_TENSOR_H_
#define TAGPARSE_TENSOR_H_

#include <cstddef>
#include <string>
#include <vector>

namespace tagparse {

// Dense row-major matrix of doubles with a name used in checkpoints and
// diagnostics.
struct Tensor {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::string name, int rows, int cols)
      : name(std::move(name)), rows(rows), cols(cols),
        data(static_cast<std::size_t>(rows) * cols, 0.0) {}

  double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
  std::size_t size() const { return data.size(); }

  bool all_finite() const;
  Tensor zeros_like() const { return Tensor(name, rows, cols); }
};

using Gradients = std::vector<Tensor>;

double squared_norm(const Gradients& grads);

}  // namespace tagparse

#endif  // TAGPARSE_TENSOR_H_
