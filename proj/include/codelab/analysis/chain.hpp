#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace codelab::analysis {

using Rational = boost::multiprecision::cpp_rational;

enum class OriginRule {
  Forbidden,  // left at s0 ends the walk unsuccessfully
  Stay,
};

std::string to_string(OriginRule r);
OriginRule parse_origin_rule(const std::string& s);

struct ChainSpec {
  std::size_t n = 1;  // goal index
  std::size_t l = 0;  // slack
  Rational p{1, 2};
  OriginRule rule = OriginRule::Forbidden;

  std::size_t budget() const noexcept { return n + 2 * l; }
  /// Throws DomainError unless n >= 1 and 0 < p < 1.
  void check() const;
};

/// Exact probability from a decimal string such as "0.3".
Rational parse_probability(const std::string& s);

/// Enumeration limit on the step budget for the brute-force oracle.
inline constexpr std::size_t kMaxBruteForceBudget = 24;

Rational p_reach_formula_exact(const ChainSpec& s);
Rational p_reach_bound_exact(const ChainSpec& s);
/// First-passage probability within the budget. Throws CapacityError past kMaxBruteForceBudget.
Rational p_reach_bruteforce_exact(const ChainSpec& s);

double p_reach_formula(const ChainSpec& s);
double p_reach_bound(const ChainSpec& s);
double p_reach_bruteforce(const ChainSpec& s);

struct ChainRow {
  std::size_t n, l;
  std::string p;
  double formula, bound, bruteforce;
};

/// Rows for n in 1..n_max, l in 0..l_max, every p, in that nesting order.
std::vector<ChainRow> tabulate(std::size_t n_max, std::size_t l_max, const std::vector<std::string>& ps,
                               OriginRule rule = OriginRule::Forbidden);

std::string chain_csv_header();
void write_chain_csv(std::ostream& os, const std::vector<ChainRow>& rows);

}  // namespace codelab::analysis
