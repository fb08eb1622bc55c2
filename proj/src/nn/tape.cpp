#include "codelab/nn/tape.hpp"

#include "codelab/errors.hpp"

#include <cmath>
#include <string>

namespace codelab::nn {

namespace {

Eigen::Map<const Vector> flat_of(const Parameter& p) { return p.value.flat(); }

}  // namespace

const Tape::Node& Tape::node(Var v) const {
  if (!v.valid() || v.id >= nodes_.size()) throw DomainError("var does not belong to this tape");
  return nodes_[v.id];
}

Eigen::Map<const Vector> Tape::value(Var v) const {
  const Node& n = node(v);
  if (n.op == Op::Param) return flat_of(*n.param);
  return {n.val.data(), n.val.size()};
}

double Tape::scalar(Var v) const {
  require_scalar(v, "scalar");
  return value(v)(0);
}

std::size_t Tape::size(Var v) const { return static_cast<std::size_t>(value(v).size()); }

void Tape::require_same_size(Var a, Var b, const char* op) const {
  if (size(a) != size(b))
    throw DimensionError(std::string(op) + ": size mismatch " + std::to_string(size(a)) + " vs " +
                         std::to_string(size(b)));
}

void Tape::require_scalar(Var a, const char* op) const {
  if (size(a) != 1) throw DimensionError(std::string(op) + ": expected a scalar");
}

Var Tape::push(Node n) {
  evaluate(n);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

void Tape::evaluate(Node& n) const {
  auto in = [&](std::uint32_t id) { return value(Var{id}); };
  switch (n.op) {
    case Op::Constant:
    case Op::Param:
      return;
    case Op::MatVec:
      n.val = nodes_[n.a].param->value.matrix() * in(n.b);
      return;
    case Op::Add:
      n.val = in(n.a) + in(n.b);
      return;
    case Op::Sub:
      n.val = in(n.a) - in(n.b);
      return;
    case Op::Mul:
      n.val = in(n.a).cwiseProduct(in(n.b));
      return;
    case Op::Scale:
      n.val = in(n.a) * n.s;
      return;
    case Op::ScaleBy:
      n.val = in(n.a) * in(n.b)(0);
      return;
    case Op::Tanh:
      n.val = in(n.a).array().tanh().matrix();
      return;
    case Op::Sigmoid:
      n.val = (1.0 / (1.0 + (-in(n.a).array()).exp())).matrix();
      return;
    case Op::Relu:
      n.val = in(n.a).cwiseMax(0.0);
      return;
    case Op::Exp:
      n.val = in(n.a).array().exp().matrix();
      return;
    case Op::Concat: {
      n.val.resize(static_cast<Eigen::Index>(n.length));
      Eigen::Index at = 0;
      for (std::uint32_t id : n.inputs) {
        auto v = in(id);
        n.val.segment(at, v.size()) = v;
        at += v.size();
      }
      return;
    }
    case Op::Slice:
      n.val = in(n.a).segment(static_cast<Eigen::Index>(n.offset), static_cast<Eigen::Index>(n.length));
      return;
    case Op::Element:
      n.val = Vector::Constant(1, in(n.a)(static_cast<Eigen::Index>(n.offset)));
      return;
    case Op::Dot:
      n.val = Vector::Constant(1, in(n.a).dot(in(n.b)));
      return;
    case Op::Sum:
      n.val = Vector::Constant(1, in(n.a).sum());
      return;
    case Op::AddN: {
      n.val = in(n.inputs.front());
      for (std::size_t i = 1; i < n.inputs.size(); ++i) n.val += in(n.inputs[i]);
      return;
    }
    case Op::LogSoftmax: {
      auto x = in(n.a);
      const double m = x.maxCoeff();
      const double lse = m + std::log((x.array() - m).exp().sum());
      n.val = (x.array() - lse).matrix();
      return;
    }
  }
}

Var Tape::constant(Vector v) {
  Node n;
  n.op = Op::Constant;
  n.val = std::move(v);
  return push(std::move(n));
}

Var Tape::constant_scalar(double x) { return constant(Vector::Constant(1, x)); }

Var Tape::param(Parameter& p) {
  Node n;
  n.op = Op::Param;
  n.param = &p;
  return push(std::move(n));
}

Var Tape::matvec(Var w, Var x) {
  const Node& wn = node(w);
  if (wn.op != Op::Param || wn.param->value.rank() != 2)
    throw DimensionError("matvec: left operand must be a matrix parameter");
  if (wn.param->value.cols() != size(x))
    throw DimensionError("matvec: " + wn.param->name + " expects input width " +
                         std::to_string(wn.param->value.cols()) + ", got " + std::to_string(size(x)));
  Node n;
  n.op = Op::MatVec;
  n.a = w.id;
  n.b = x.id;
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  require_same_size(a, b, "add");
  Node n;
  n.op = Op::Add;
  n.a = a.id;
  n.b = b.id;
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  require_same_size(a, b, "sub");
  Node n;
  n.op = Op::Sub;
  n.a = a.id;
  n.b = b.id;
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  require_same_size(a, b, "mul");
  Node n;
  n.op = Op::Mul;
  n.a = a.id;
  n.b = b.id;
  return push(std::move(n));
}

Var Tape::scale(Var a, double s) {
  node(a);
  Node n;
  n.op = Op::Scale;
  n.a = a.id;
  n.s = s;
  return push(std::move(n));
}

Var Tape::scale_by(Var a, Var s) {
  require_scalar(s, "scale_by");
  Node n;
  n.op = Op::ScaleBy;
  n.a = a.id;
  n.b = s.id;
  return push(std::move(n));
}

#define CODELAB_UNARY(fn, OPC) \
  Var Tape::fn(Var a) {        \
    node(a);                   \
    Node n;                    \
    n.op = Op::OPC;            \
    n.a = a.id;                \
    return push(std::move(n)); \
  }

CODELAB_UNARY(tanh, Tanh)
CODELAB_UNARY(sigmoid, Sigmoid)
CODELAB_UNARY(relu, Relu)
CODELAB_UNARY(exp, Exp)
CODELAB_UNARY(sum, Sum)
#undef CODELAB_UNARY

Var Tape::log_softmax(Var a) {
  if (size(a) == 0) throw DomainError("log_softmax of empty logits");
  Node n;
  n.op = Op::LogSoftmax;
  n.a = a.id;
  return push(std::move(n));
}

Var Tape::concat(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("concat of nothing");
  Node n;
  n.op = Op::Concat;
  for (Var v : parts) {
    n.length += size(v);
    n.inputs.push_back(v.id);
  }
  return push(std::move(n));
}

Var Tape::slice(Var a, std::size_t offset, std::size_t length) {
  if (length == 0 || offset + length > size(a))
    throw DimensionError("slice [" + std::to_string(offset) + ", +" + std::to_string(length) +
                         ") out of range for size " + std::to_string(size(a)));
  Node n;
  n.op = Op::Slice;
  n.a = a.id;
  n.offset = offset;
  n.length = length;
  return push(std::move(n));
}

Var Tape::element(Var a, std::size_t index) {
  if (index >= size(a)) throw DimensionError("element index out of range");
  Node n;
  n.op = Op::Element;
  n.a = a.id;
  n.offset = index;
  return push(std::move(n));
}

Var Tape::dot(Var a, Var b) {
  require_same_size(a, b, "dot");
  Node n;
  n.op = Op::Dot;
  n.a = a.id;
  n.b = b.id;
  return push(std::move(n));
}

Var Tape::add_n(std::span<const Var> terms) {
  if (terms.empty()) throw DimensionError("add_n of nothing");
  Node n;
  n.op = Op::AddN;
  for (Var v : terms) {
    require_same_size(v, terms.front(), "add_n");
    n.inputs.push_back(v.id);
  }
  return push(std::move(n));
}

void Tape::accumulate(std::uint32_t id, const Vector& g) {
  Node& n = nodes_[id];
  if (n.op == Op::Param) {
    n.param->grad.flat() += g;
    return;
  }
  if (n.op == Op::Constant) return;
  Vector& slot = grads_[id];
  if (slot.size() == 0)
    slot = g;
  else
    slot += g;
}

void Tape::backward(Var out) {
  require_scalar(out, "backward");
  grads_.assign(nodes_.size(), Vector());
  grads_[out.id] = Vector::Ones(1);
  for (std::uint32_t i = out.id + 1; i-- > 0;) {
    if (grads_[i].size() == 0) continue;
    const Vector g = grads_[i];
    const Node& n = nodes_[i];
    auto in = [&](std::uint32_t id) { return value(Var{id}); };
    switch (n.op) {
      case Op::Constant:
      case Op::Param:
        break;
      case Op::MatVec: {
        Parameter& w = *nodes_[n.a].param;
        w.grad.matrix().noalias() += g * in(n.b).transpose();
        accumulate(n.b, w.value.matrix().transpose() * g);
        break;
      }
      case Op::Add:
        accumulate(n.a, g);
        accumulate(n.b, g);
        break;
      case Op::Sub:
        accumulate(n.a, g);
        accumulate(n.b, -g);
        break;
      case Op::Mul:
        accumulate(n.a, g.cwiseProduct(in(n.b)));
        accumulate(n.b, g.cwiseProduct(in(n.a)));
        break;
      case Op::Scale:
        accumulate(n.a, g * n.s);
        break;
      case Op::ScaleBy:
        accumulate(n.a, g * in(n.b)(0));
        accumulate(n.b, Vector::Constant(1, g.dot(in(n.a))));
        break;
      case Op::Tanh:
        accumulate(n.a, g.cwiseProduct((1.0 - n.val.array().square()).matrix()));
        break;
      case Op::Sigmoid:
        accumulate(n.a, g.cwiseProduct((n.val.array() * (1.0 - n.val.array())).matrix()));
        break;
      case Op::Relu:
        accumulate(n.a, g.cwiseProduct((in(n.a).array() > 0.0).cast<double>().matrix()));
        break;
      case Op::Exp:
        accumulate(n.a, g.cwiseProduct(n.val));
        break;
      case Op::Concat: {
        Eigen::Index at = 0;
        for (std::uint32_t id : n.inputs) {
          const Eigen::Index len = static_cast<Eigen::Index>(size(Var{id}));
          accumulate(id, g.segment(at, len));
          at += len;
        }
        break;
      }
      case Op::Slice: {
        Vector full = Vector::Zero(static_cast<Eigen::Index>(size(Var{n.a})));
        full.segment(static_cast<Eigen::Index>(n.offset), static_cast<Eigen::Index>(n.length)) = g;
        accumulate(n.a, full);
        break;
      }
      case Op::Element: {
        Vector full = Vector::Zero(static_cast<Eigen::Index>(size(Var{n.a})));
        full(static_cast<Eigen::Index>(n.offset)) = g(0);
        accumulate(n.a, full);
        break;
      }
      case Op::Dot:
        accumulate(n.a, g(0) * in(n.b));
        accumulate(n.b, g(0) * in(n.a));
        break;
      case Op::Sum:
        accumulate(n.a, Vector::Constant(static_cast<Eigen::Index>(size(Var{n.a})), g(0)));
        break;
      case Op::AddN:
        for (std::uint32_t id : n.inputs) accumulate(id, g);
        break;
      case Op::LogSoftmax: {
        const Vector p = n.val.array().exp().matrix();
        accumulate(n.a, g - p * g.sum());
        break;
      }
    }
  }
}

Vector Tape::gradient(Var v) const {
  const Node& n = node(v);
  if (n.op == Op::Param) return n.param->grad.flat();
  if (v.id < grads_.size() && grads_[v.id].size() > 0) return grads_[v.id];
  return Vector::Zero(static_cast<Eigen::Index>(size(v)));
}

Vector Tape::replay(Var out) {
  node(out);
  for (std::uint32_t i = 0; i <= out.id; ++i) evaluate(nodes_[i]);
  return value(out);
}

}  // namespace codelab::nn
