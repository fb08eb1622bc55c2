#include "codelab/analysis/probe.hpp"

#include "codelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace codelab::analysis {

namespace {

double mean(std::vector<double>::const_iterator b, std::vector<double>::const_iterator e) {
  if (b == e) return 0.0;
  return std::accumulate(b, e, 0.0) / static_cast<double>(e - b);
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("correlation inputs differ in length");
  if (x.size() < 2) return 0.0;
  double mx = mean(x.begin(), x.end()), my = mean(y.begin(), y.end());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) { return pearson(ranks(x), ranks(y)); }

double ProbeReport::first_mean() const {
  auto w = std::min(window, non_skip_fraction.size());
  return mean(non_skip_fraction.begin(), non_skip_fraction.begin() + static_cast<std::ptrdiff_t>(w));
}

double ProbeReport::last_mean() const {
  auto w = std::min(window, non_skip_fraction.size());
  return mean(non_skip_fraction.end() - static_cast<std::ptrdiff_t>(w), non_skip_fraction.end());
}

double ProbeReport::mean_difficulty() const { return mean(difficulty.begin(), difficulty.end()); }

double ProbeReport::success_correlation(double beta) const {
  std::vector<double> s(best_return.size());
  std::transform(best_return.begin(), best_return.end(), s.begin(), [&](double r) { return r > beta ? 1.0 : 0.0; });
  return pearson(non_skip_fraction, s);
}

nlohmann::json ProbeReport::to_json() const {
  return {{"iterations", non_skip_fraction.size()},
          {"window", window},
          {"first_mean", first_mean()},
          {"last_mean", last_mean()},
          {"mean_difficulty", mean_difficulty()},
          {"success_correlation", success_correlation()},
          {"non_skip_fraction", non_skip_fraction}};
}

ProbeReport degenerate_case_probe(train::Trainer& trainer, std::size_t iterations, std::size_t window) {
  ProbeReport rep;
  rep.window = window;
  double budget = static_cast<double>(trainer.config().budget);
  for (std::size_t i = 0; i < iterations; ++i) {
    auto rec = trainer.step();
    rep.non_skip_fraction.push_back(static_cast<double>(rec.non_skip) / budget);
    rep.difficulty.push_back(rec.difficulty);
    rep.best_return.push_back(rec.best_return);
  }
  return rep;
}

}  // namespace codelab::analysis
