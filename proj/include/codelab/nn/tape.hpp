#pragma once

#include "codelab/nn/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace codelab::nn {

/// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::uint32_t kInvalid = 0xffffffffu;
  std::uint32_t id = kInvalid;
  bool valid() const noexcept { return id != kInvalid; }
};

/// Reverse-mode computation record.
///
/// Every op evaluates eagerly and caches its value. `backward` walks the record
/// in reverse and accumulates gradients into the nodes and, for parameter
/// leaves, directly into `Parameter::grad`. A tape is single-threaded; separate
/// tapes over separate parameter sets share nothing.
///
/// Vectors are the only non-leaf values. Matrices enter a tape only as
/// parameter leaves consumed by `matvec`.
class Tape {
 public:
  Tape() = default;

  Var constant(Vector v);
  Var constant_scalar(double x);
  Var param(Parameter& p);

  Var matvec(Var w, Var x);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double s);
  Var scale_by(Var a, Var s);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var relu(Var a);
  Var exp(Var a);
  Var concat(std::span<const Var> parts);
  Var slice(Var a, std::size_t offset, std::size_t length);
  Var element(Var a, std::size_t index);
  Var dot(Var a, Var b);
  Var sum(Var a);
  Var add_n(std::span<const Var> terms);
  Var log_softmax(Var a);

  Eigen::Map<const Vector> value(Var v) const;
  double scalar(Var v) const;
  std::size_t size(Var v) const;
  std::size_t num_nodes() const noexcept { return nodes_.size(); }

  /// Accumulates d(out)/d(parameter) into every parameter leaf reached from `out`.
  /// `out` must be a scalar.
  void backward(Var out);

  /// Gradient of the last `backward` output with respect to a recorded node.
  Vector gradient(Var v) const;

  /// Recomputes every derived node from its inputs and returns the new value of `out`.
  Vector replay(Var out);

 private:
  enum class Op : std::uint8_t {
    Constant, Param, MatVec, Add, Sub, Mul, Scale, ScaleBy, Tanh, Sigmoid, Relu, Exp,
    Concat, Slice, Element, Dot, Sum, AddN, LogSoftmax
  };

  struct Node {
    Op op = Op::Constant;
    std::uint32_t a = Var::kInvalid;
    std::uint32_t b = Var::kInvalid;
    std::vector<std::uint32_t> inputs;
    std::size_t offset = 0;
    std::size_t length = 0;
    double s = 0.0;
    Parameter* param = nullptr;
    Vector val;
  };

  Var push(Node node);
  void evaluate(Node& node) const;
  const Node& node(Var v) const;
  void accumulate(std::uint32_t id, const Vector& g);
  void require_same_size(Var a, Var b, const char* op) const;
  void require_scalar(Var a, const char* op) const;

  std::vector<Node> nodes_;
  std::vector<Vector> grads_;
};

}  // namespace codelab::nn
