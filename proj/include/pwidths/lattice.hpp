#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace pwidths {

using Rational = boost::multiprecision::cpp_rational;

/// Exact rational from a decimal literal such as "0.05", "1/40" or "2.5e-3".
Rational parse_rational(const std::string& text);
/// Exact rational of the shortest decimal that round-trips to `x`.
Rational rational_from_double(double x);

/// 2π·turns + c, compared exactly (π is irrational, so only the c parts of
/// equal-turn values can tie).
struct SymbolicReal {
  Rational turns;
  Rational constant;
  double to_double() const;
  std::string to_string() const;
};

/// Sign of 2π·turns + c.
int sign(const SymbolicReal& x);
int compare(const SymbolicReal& a, const SymbolicReal& b);

/// Lattice value 2π j + μ k with j = n₁+n₂+n₃, k = n₂+2n₃.
struct LatticeValue {
  long long j = 0;
  long long k = 0;
  SymbolicReal exact(const Rational& mu) const;
  double value(const Rational& mu) const;
  bool operator==(const LatticeValue&) const = default;
};

/// Sorted, deduplicated lattice values in (0, bound].
std::vector<LatticeValue> quantization_values(const Rational& mu, const SymbolicReal& bound);
std::vector<LatticeValue> quantization_values(const Rational& mu, double bound);

/// Independent exhaustive triple loop over n_i ≤ ⌈bound/2π⌉ + 1.
std::vector<LatticeValue> quantization_values_bruteforce(const Rational& mu,
                                                         const SymbolicReal& bound);

struct CountReport {
  long long m = 0;
  Rational mu;
  long long count = 0;
  long long expected = 0;
  std::vector<long long> strata_sizes;
};

/// #(values ≤ 2πm + 1) = (m+1)² − 1, with stratum j = {0, μ, …, 2jμ} of size 2j+1.
CountReport count_check(long long m, const Rational& mu);

struct PinchInterval {
  long long p = 0;
  long long m = 0;
  Rational mu;
  SymbolicReal lower;
  SymbolicReal upper;
  /// p-th smallest lattice value, which must lie in [lower, upper].
  LatticeValue pth;
};

long long isqrt(long long p);

PinchInterval pinch_bounds(long long p, const Rational& mu);

struct WidthEntry {
  long long p = 0;
  /// ω_p = 2π·floor_sqrt exactly.
  long long floor_sqrt = 0;
  double value = 0.0;
  double crofton_upper = 0.0;
};

struct WidthTable {
  long long p_max = 0;
  std::vector<WidthEntry> entries;
  /// Pinch cross-checks for μ ∈ {0.1, 0.01, 0.001}, where the μ < 1/(2m) regime allows.
  std::vector<PinchInterval> pinch;
};

WidthTable width_table(long long p_max, bool with_pinch = true);

/// Richardson limit of ω_p p^{-1/2} / vol(S²)^{1/2} on p = m².
double weyl_constant(const WidthTable& table);
/// Mean of ω_p p^{-1/2} / vol(S²)^{1/2} over p ∈ (p_max/2, p_max].
double weyl_constant_all_p(const WidthTable& table);

}  // namespace pwidths
