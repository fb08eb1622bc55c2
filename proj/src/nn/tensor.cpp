#include "codelab/nn/tensor.hpp"

#include "codelab/errors.hpp"

#include <cmath>
#include <functional>
#include <numeric>

namespace codelab::nn {

Tensor::Tensor(std::size_t n) : rank_(1), m_(Matrix::Zero(static_cast<Eigen::Index>(n), 1)) {}

Tensor::Tensor(std::size_t rows, std::size_t cols)
    : rank_(2), m_(Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols))) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data) {
  if (shape.empty() || shape.size() > 2)
    throw DimensionError("tensor rank must be 1 or 2, got " + std::to_string(shape.size()));
  for (std::size_t d : shape)
    if (d == 0) throw DimensionError("tensor dimensions must be positive");
  const std::size_t expected =
      std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  if (expected != data.size())
    throw DimensionError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape product " + std::to_string(expected));
  for (double x : data)
    if (!std::isfinite(x)) throw DomainError("tensor entries must be finite");
  rank_ = shape.size();
  const auto rows = static_cast<Eigen::Index>(shape[0]);
  const auto cols = static_cast<Eigen::Index>(rank_ == 2 ? shape[1] : 1);
  m_ = Eigen::Map<const Matrix>(data.data(), rows, cols);
}

std::vector<std::size_t> Tensor::shape() const {
  if (rank_ == 1) return {rows()};
  return {rows(), cols()};
}

std::size_t count_parameters(const ParamRefs& params) {
  std::size_t total = 0;
  for (const Parameter* p : params) total += p->value.size();
  return total;
}

void zero_grad(const ParamRefs& params) {
  for (Parameter* p : params) p->grad.set_zero();
}

double global_grad_norm(const ParamRefs& params) {
  double sq = 0.0;
  for (const Parameter* p : params) sq += p->grad.matrix().squaredNorm();
  return std::sqrt(sq);
}

}  // namespace codelab::nn
