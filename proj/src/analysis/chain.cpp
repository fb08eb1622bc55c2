#include "codelab/analysis/chain.hpp"

#include "codelab/errors.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace codelab::analysis {

namespace {

Rational power(const Rational& x, std::size_t k) {
  Rational r = 1;
  for (std::size_t i = 0; i < k; ++i) r *= x;
  return r;
}

Rational binomial(std::size_t n, std::size_t k) {
  Rational r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string shortest(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(OriginRule r) { return r == OriginRule::Stay ? "stay" : "forbidden"; }

OriginRule parse_origin_rule(const std::string& s) {
  if (s == "stay") return OriginRule::Stay;
  if (s == "forbidden" || s == "no-op-forbidden") return OriginRule::Forbidden;
  throw DomainError("unknown origin rule: " + s);
}

void ChainSpec::check() const {
  if (n < 1) throw DomainError("chain goal index must be at least 1");
  if (p <= 0 || p >= 1) throw DomainError("right-step probability must lie in (0, 1)");
}

Rational parse_probability(const std::string& s) {
  auto dot = s.find('.');
  std::string digits = s;
  Rational den = 1;
  if (dot != std::string::npos) {
    digits = s.substr(0, dot) + s.substr(dot + 1);
    den = power(Rational(10), s.size() - dot - 1);
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw DomainError("bad probability: " + s);
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  return Rational(boost::multiprecision::cpp_int(digits)) / den;
}

Rational p_reach_formula_exact(const ChainSpec& s) {
  s.check();
  Rational q = 1 - s.p, sum = 0;
  for (std::size_t t = 0; t <= s.l; ++t) sum += binomial(s.n + 2 * t, t) * power(s.p, s.n + t) * power(q, t);
  return sum;
}

Rational p_reach_bound_exact(const ChainSpec& s) {
  s.check();
  return power(s.p, s.n) * power(1 + s.p - s.p * s.p, s.l);
}

Rational p_reach_bruteforce_exact(const ChainSpec& s) {
  s.check();
  std::size_t steps = s.budget();
  if (steps > kMaxBruteForceBudget)
    throw CapacityError("chain budget " + std::to_string(steps) + " exceeds enumeration bound " +
                        std::to_string(kMaxBruteForceBudget));
  // mass over positions 0..n-1 of walks that have not yet hit the goal
  std::vector<Rational> mass(s.n, 0);
  mass[0] = 1;
  Rational q = 1 - s.p, hit = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    std::vector<Rational> next(s.n, 0);
    for (std::size_t x = 0; x < s.n; ++x) {
      if (mass[x] == 0) continue;
      if (x + 1 == s.n)
        hit += mass[x] * s.p;
      else
        next[x + 1] += mass[x] * s.p;
      if (x > 0)
        next[x - 1] += mass[x] * q;
      else if (s.rule == OriginRule::Stay)
        next[0] += mass[x] * q;
    }
    mass = std::move(next);
  }
  return hit;
}

double p_reach_formula(const ChainSpec& s) { return to_double(p_reach_formula_exact(s)); }
double p_reach_bound(const ChainSpec& s) { return to_double(p_reach_bound_exact(s)); }
double p_reach_bruteforce(const ChainSpec& s) { return to_double(p_reach_bruteforce_exact(s)); }

std::vector<ChainRow> tabulate(std::size_t n_max, std::size_t l_max, const std::vector<std::string>& ps,
                               OriginRule rule) {
  std::vector<ChainRow> rows;
  for (std::size_t n = 1; n <= n_max; ++n)
    for (std::size_t l = 0; l <= l_max; ++l)
      for (const auto& p : ps) {
        ChainSpec s{n, l, parse_probability(p), rule};
        rows.push_back({n, l, p, p_reach_formula(s), p_reach_bound(s), p_reach_bruteforce(s)});
      }
  return rows;
}

std::string chain_csv_header() { return "N,L,p,formula,bound,bruteforce"; }

void write_chain_csv(std::ostream& os, const std::vector<ChainRow>& rows) {
  os << chain_csv_header() << '\n';
  for (const auto& r : rows)
    os << r.n << ',' << r.l << ',' << r.p << ',' << shortest(r.formula) << ',' << shortest(r.bound) << ','
       << shortest(r.bruteforce) << '\n';
}

}  // namespace codelab::analysis
