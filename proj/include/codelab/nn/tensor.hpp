#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace codelab::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Rank-1 or rank-2 array of doubles, stored row-major.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::size_t n);
  Tensor(std::size_t rows, std::size_t cols);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  std::vector<std::size_t> shape() const;
  std::size_t rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.size()); }
  std::size_t rows() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(m_.cols()); }

  std::span<double> data() noexcept { return {m_.data(), size()}; }
  std::span<const double> data() const noexcept { return {m_.data(), size()}; }

  Matrix& matrix() noexcept { return m_; }
  const Matrix& matrix() const noexcept { return m_; }

  Eigen::Map<Vector> flat() noexcept { return {m_.data(), m_.size()}; }
  Eigen::Map<const Vector> flat() const noexcept { return {m_.data(), m_.size()}; }

  void set_zero() { m_.setZero(); }
  bool all_finite() const { return m_.allFinite(); }

  bool same_shape(const Tensor& other) const {
    return rank_ == other.rank_ && m_.rows() == other.m_.rows() && m_.cols() == other.m_.cols();
  }

 private:
  std::size_t rank_ = 1;
  Matrix m_;
};

/// A named trainable tensor together with its gradient accumulator.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value) {
    grad.set_zero();
  }
};

using ParamRefs = std::vector<Parameter*>;

std::size_t count_parameters(const ParamRefs& params);
void zero_grad(const ParamRefs& params);
double global_grad_norm(const ParamRefs& params);

}  // namespace codelab::nn
