#pragma once

#include <Eigen/Dense>

#include <vector>

namespace aquaaug::nnref {

struct Dims {
  int batch = 1;
  int channels = 1;
  int height = 1;
  int width = 1;

  int tokens() const noexcept { return height * width; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(batch) * channels * height * width;
  }
  bool operator==(const Dims&) const = default;
};

/// B x C x H x W feature map of doubles, row-major.
class TensorMap {
 public:
  TensorMap() = default;
  explicit TensorMap(Dims dims);
  TensorMap(Dims dims, std::vector<double> data);

  const Dims& dims() const noexcept { return dims_; }
  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  double& at(int b, int c, int y, int x) { return data_[offset(b, c, y, x)]; }
  double at(int b, int c, int y, int x) const { return data_[offset(b, c, y, x)]; }

  /// Slice b as an (H*W) x C token matrix; token n = y * W + x.
  Eigen::MatrixXd tokens(int b) const;
  void set_tokens(int b, const Eigen::MatrixXd& m);

  bool operator==(const TensorMap&) const = default;

 private:
  std::size_t offset(int b, int c, int y, int x) const noexcept {
    return ((static_cast<std::size_t>(b) * dims_.channels + c) * dims_.height + y) * dims_.width + x;
  }

  Dims dims_;
  std::vector<double> data_;
};

}  // namespace aquaaug::nnref
