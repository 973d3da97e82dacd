#include "aquaaug/nnref/tensor.hpp"

#include <cmath>

#include "aquaaug/errors.hpp"

namespace aquaaug::nnref {

TensorMap::TensorMap(Dims dims) : dims_(dims), data_(dims.size(), 0.0) {}

TensorMap::TensorMap(Dims dims, std::vector<double> data) : dims_(dims), data_(std::move(data)) {
  if (data_.size() != dims_.size()) throw ShapeMismatch("tensor data length != B*C*H*W");
  for (double v : data_)
    if (!std::isfinite(v)) throw InvalidArgument("tensor values must be finite");
}

Eigen::MatrixXd TensorMap::tokens(int b) const {
  const int n = dims_.tokens();
  Eigen::MatrixXd m(n, dims_.channels);
  for (int c = 0; c < dims_.channels; ++c)
    for (int t = 0; t < n; ++t) m(t, c) = data_[offset(b, c, 0, 0) + t];
  return m;
}

void TensorMap::set_tokens(int b, const Eigen::MatrixXd& m) {
  const int n = dims_.tokens();
  if (m.rows() != n || m.cols() != dims_.channels) throw ShapeMismatch("token matrix shape");
  for (int c = 0; c < dims_.channels; ++c)
    for (int t = 0; t < n; ++t) data_[offset(b, c, 0, 0) + t] = m(t, c);
}

}  // namespace aquaaug::nnref
