#pragma once

#include "codelab/nn/tape.hpp"
#include "codelab/random.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <functional>
#include <vector>

namespace fdcheck {

using codelab::nn::ParamRefs;
using codelab::nn::Tape;
using codelab::nn::Var;

/// Builds a scalar loss on the given tape.
using LossFn = std::function<Var(Tape&)>;

inline double evaluate(const LossFn& f) {
  Tape tape;
  return tape.scalar(f(tape));
}

struct Report {
  double max_rel = 0.0;
  std::size_t checked = 0;
  std::size_t failures = 0;
};

/// Compares analytic gradients to fourth-order central differences (step h). Entries are
/// accepted when |a - n| <= tol * max(|a|, |n|) or both are below `floor`.
/// When `sample` > 0 only that many random coordinates per parameter are probed.
inline Report check(const ParamRefs& params, const LossFn& f, double tol = 1e-4,
                    double h = 1e-5, std::size_t sample = 0, std::uint64_t seed = 1,
                    double floor = 1e-7) {
  codelab::nn::zero_grad(params);
  {
    Tape tape;
    tape.backward(f(tape));
  }
  std::vector<std::vector<double>> analytic;
  for (auto* p : params) {
    auto g = p->grad.data();
    analytic.emplace_back(g.begin(), g.end());
  }
  codelab::nn::zero_grad(params);

  codelab::RandomStream rng(seed);
  Report rep;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto data = params[pi]->value.data();
    std::vector<std::size_t> idx;
    if (sample == 0 || sample >= data.size()) {
      for (std::size_t i = 0; i < data.size(); ++i) idx.push_back(i);
    } else {
      for (std::size_t k = 0; k < sample; ++k) idx.push_back(rng.uniform_index(data.size()));
    }
    for (std::size_t i : idx) {
      const double saved = data[i];
      auto at = [&](double off) {
        data[i] = saved + off;
        return evaluate(f);
      };
      // fourth-order central stencil
      const double numeric = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
      data[i] = saved;
      const double a = analytic[pi][i];
      const double diff = std::abs(a - numeric);
      const double scale = std::max(std::abs(a), std::abs(numeric));
      ++rep.checked;
      if (scale < floor && diff < floor) continue;
      const double rel = diff / scale;
      rep.max_rel = std::max(rep.max_rel, rel);
      if (rel > tol) {
        ++rep.failures;
        if (std::getenv("FD_VERBOSE"))
          std::fprintf(stderr, "fd %s[%zu] analytic %.12g numeric %.12g rel %.3g\n", params[pi]->name.c_str(), i, a, numeric, rel);
      }
    }
  }
  return rep;
}

}  // namespace fdcheck
