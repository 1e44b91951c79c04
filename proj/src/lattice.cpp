#include "pwidths/lattice.hpp"

#include "pwidths/crofton.hpp"
#include "pwidths/error.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace pwidths {

namespace {

using Float50 = boost::multiprecision::cpp_bin_float_50;

Float50 to_float(const Rational& r) {
  return Float50(boost::multiprecision::numerator(r)) /
         Float50(boost::multiprecision::denominator(r));
}

Rational pow10(int e) {
  Rational r = 1;
  for (int i = 0; i < std::abs(e); ++i) r *= 10;
  return e >= 0 ? r : Rational(1) / r;
}

bool lattice_less(const LatticeValue& a, const LatticeValue& b, const Rational& mu, double mud) {
  if (a.j == b.j) return a.k < b.k;
  const double d = 2.0 * std::numbers::pi * double(a.j - b.j) + mud * double(a.k - b.k);
  if (std::abs(d) > 1e-9) return d < 0;
  return sign({Rational(a.j - b.j), mu * (a.k - b.k)}) < 0;
}

void require_mu(const Rational& mu) {
  if (mu <= 0) fail(ErrorKind::InvalidArgument, "mu must be positive");
}

// Largest j with 2πj ≤ bound.
long long max_turns(const SymbolicReal& bound) {
  long long j = static_cast<long long>(std::floor(bound.to_double() / (2.0 * std::numbers::pi)));
  j = std::max(j, 0LL);
  while (j > 0 && compare({Rational(j), 0}, bound) > 0) --j;
  while (compare({Rational(j + 1), 0}, bound) <= 0) ++j;
  return j;
}

std::string rational_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const Rational num = parse_rational(text.substr(0, slash));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) fail(ErrorKind::InvalidArgument, "zero denominator in '" + text + "'");
    return num / den;
  }
  size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
  boost::multiprecision::cpp_int digits = 0;
  int scale = 0;
  bool any = false, dot = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      if (dot) --scale;
      any = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) fail(ErrorKind::InvalidArgument, "not a number: '" + text + "'");
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    int e = 0;
    const auto res = std::from_chars(text.data() + i + 1, text.data() + text.size(), e);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
      fail(ErrorKind::InvalidArgument, "bad exponent in '" + text + "'");
    scale += e;
    i = text.size();
  }
  if (i != text.size()) fail(ErrorKind::InvalidArgument, "not a number: '" + text + "'");
  Rational r = Rational(digits) * pow10(scale);
  return neg ? Rational(-r) : r;
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "non-finite value");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return parse_rational(std::string(buf, res.ptr));
}

double SymbolicReal::to_double() const {
  return 2.0 * std::numbers::pi * turns.convert_to<double>() + constant.convert_to<double>();
}

std::string SymbolicReal::to_string() const {
  std::string s;
  if (turns != 0) s = "2pi*" + rational_string(turns);
  if (constant != 0 || s.empty()) {
    if (!s.empty()) s += constant < 0 ? " - " : " + ";
    s += rational_string(s.empty() ? constant : abs(constant));
  }
  return s;
}

int sign(const SymbolicReal& x) {
  if (x.turns == 0) return x.constant == 0 ? 0 : (x.constant > 0 ? 1 : -1);
  const Float50 v = 2 * boost::math::constants::pi<Float50>() * to_float(x.turns) +
                    to_float(x.constant);
  return v > 0 ? 1 : -1;
}

int compare(const SymbolicReal& a, const SymbolicReal& b) {
  return sign({a.turns - b.turns, a.constant - b.constant});
}

SymbolicReal LatticeValue::exact(const Rational& mu) const { return {Rational(j), mu * k}; }

double LatticeValue::value(const Rational& mu) const { return exact(mu).to_double(); }

std::vector<LatticeValue> quantization_values(const Rational& mu, const SymbolicReal& bound) {
  require_mu(mu);
  std::vector<LatticeValue> out;
  const long long jmax = max_turns(bound);
  for (long long j = 1; j <= jmax; ++j) {
    std::set<long long> ks;
    for (long long n2 = 0; n2 <= j; ++n2)
      for (long long n3 = 0; n2 + n3 <= j; ++n3) ks.insert(n2 + 2 * n3);
    for (long long k : ks) {
      const LatticeValue v{j, k};
      if (compare(v.exact(mu), bound) <= 0) out.push_back(v);
    }
  }
  const double mud = mu.convert_to<double>();
  std::sort(out.begin(), out.end(),
            [&](const LatticeValue& a, const LatticeValue& b) { return lattice_less(a, b, mu, mud); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<LatticeValue> quantization_values(const Rational& mu, double bound) {
  return quantization_values(mu, SymbolicReal{0, rational_from_double(bound)});
}

std::vector<LatticeValue> quantization_values_bruteforce(const Rational& mu,
                                                         const SymbolicReal& bound) {
  require_mu(mu);
  const long long n =
      static_cast<long long>(std::ceil(bound.to_double() / (2.0 * std::numbers::pi))) + 1;
  std::vector<LatticeValue> out;
  for (long long n1 = 0; n1 <= n; ++n1)
    for (long long n2 = 0; n2 <= n; ++n2)
      for (long long n3 = 0; n3 <= n; ++n3) {
        const LatticeValue v{n1 + n2 + n3, n2 + 2 * n3};
        const SymbolicReal x = v.exact(mu);
        if (sign(x) > 0 && compare(x, bound) <= 0) out.push_back(v);
      }
  const double mud = mu.convert_to<double>();
  std::sort(out.begin(), out.end(),
            [&](const LatticeValue& a, const LatticeValue& b) { return lattice_less(a, b, mu, mud); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CountReport count_check(long long m, const Rational& mu) {
  if (m < 1) fail(ErrorKind::InvalidArgument, "m must be >= 1");
  require_mu(mu);
  if (mu * (2 * m) >= 1) fail(ErrorKind::MuTooLarge, "need mu < 1/(2m)");
  CountReport r;
  r.m = m;
  r.mu = mu;
  r.expected = (m + 1) * (m + 1) - 1;
  const auto values = quantization_values(mu, SymbolicReal{Rational(m), Rational(1)});
  r.count = static_cast<long long>(values.size());
  r.strata_sizes.assign(m, 0);
  for (long long j = 1; j <= m; ++j) {
    std::vector<long long> ks;
    for (const auto& v : values)
      if (v.j == j) ks.push_back(v.k);
    r.strata_sizes[j - 1] = static_cast<long long>(ks.size());
    bool ok = static_cast<long long>(ks.size()) == 2 * j + 1;
    for (long long i = 0; ok && i < 2 * j + 1; ++i) ok = ks[i] == i;
    if (!ok) {
      std::ostringstream os;
      os << "stratum j = " << j << " has " << ks.size() << " values, expected " << 2 * j + 1;
      fail(ErrorKind::AssertionFailed, os.str());
    }
  }
  for (const auto& v : values)
    if (v.j > m) fail(ErrorKind::AssertionFailed, "value beyond stratum m below the bound");
  if (r.count != r.expected) {
    std::ostringstream os;
    os << "count " << r.count << " != (m+1)^2 - 1 = " << r.expected;
    fail(ErrorKind::AssertionFailed, os.str());
  }
  return r;
}

long long isqrt(long long p) {
  if (p < 0) fail(ErrorKind::InvalidArgument, "isqrt of a negative number");
  long long r = static_cast<long long>(std::sqrt(static_cast<double>(p)));
  while (r * r > p) --r;
  while ((r + 1) * (r + 1) <= p) ++r;
  return r;
}

namespace {

PinchInterval pinch_from_sorted(long long p, const Rational& mu,
                                const std::vector<LatticeValue>& sorted) {
  PinchInterval out;
  out.p = p;
  out.m = isqrt(p);
  out.mu = mu;
  out.lower = {Rational(out.m), 0};
  out.upper = {Rational(out.m), 2 * mu * out.m};
  if (static_cast<long long>(sorted.size()) < p)
    fail(ErrorKind::AssertionFailed, "fewer lattice values than p below the pinch bound");
  out.pth = sorted[p - 1];
  if (p >= 2 && compare(sorted[p - 2].exact(mu), out.pth.exact(mu)) >= 0)
    fail(ErrorKind::AssertionFailed, "lattice values are not strictly increasing");
  const SymbolicReal v = out.pth.exact(mu);
  if (compare(v, out.lower) < 0 || compare(v, out.upper) > 0) {
    std::ostringstream os;
    os << "p-th lattice value " << v.to_string() << " leaves [" << out.lower.to_string() << ", "
       << out.upper.to_string() << "]";
    fail(ErrorKind::AssertionFailed, os.str());
  }
  return out;
}

}  // namespace

PinchInterval pinch_bounds(long long p, const Rational& mu) {
  if (p < 1) fail(ErrorKind::InvalidArgument, "p must be >= 1");
  require_mu(mu);
  const long long m = isqrt(p);
  if (mu * (2 * m) >= 1) fail(ErrorKind::MuTooLarge, "need mu < 1/(2 floor(sqrt p))");
  const auto sorted = quantization_values(mu, SymbolicReal{Rational(m), 2 * mu * m});
  return pinch_from_sorted(p, mu, sorted);
}

WidthTable width_table(long long p_max, bool with_pinch) {
  if (p_max < 1) fail(ErrorKind::InvalidArgument, "p_max must be >= 1");
  WidthTable t;
  t.p_max = p_max;
  t.entries.reserve(static_cast<size_t>(p_max));
  for (long long p = 1; p <= p_max; ++p) {
    WidthEntry e;
    e.p = p;
    e.floor_sqrt = isqrt(p);
    e.value = 2.0 * std::numbers::pi * static_cast<double>(e.floor_sqrt);
    e.crofton_upper = width_upper_bound(p);
    if (e.crofton_upper != e.value) {
      std::ostringstream os;
      os << "Crofton bound " << e.crofton_upper << " differs from 2pi*" << e.floor_sqrt
         << " at p = " << p;
      fail(ErrorKind::AssertionFailed, os.str());
    }
    t.entries.push_back(e);
  }
  if (!with_pinch) return t;
  constexpr long long kMaxPinchM = 30;
  for (const char* mus : {"0.1", "0.01", "0.001"}) {
    const Rational mu = parse_rational(mus);
    long long M = std::min(isqrt(p_max), kMaxPinchM);
    while (M >= 1 && mu * (2 * M) >= 1) --M;
    if (M < 1) continue;
    const auto sorted = quantization_values(mu, SymbolicReal{Rational(M), 2 * mu * M});
    const long long p_hi = std::min(p_max, (M + 1) * (M + 1) - 1);
    for (long long p = 1; p <= p_hi; ++p) {
      auto iv = pinch_from_sorted(p, mu, sorted);
      if (iv.m != t.entries[p - 1].floor_sqrt)
        fail(ErrorKind::AssertionFailed, "pinch level disagrees with the width table");
      t.pinch.push_back(std::move(iv));
    }
  }
  return t;
}

double weyl_constant(const WidthTable& table) {
  if (table.p_max < 10000) fail(ErrorKind::TableTooSmall, "the Weyl limit needs p_max >= 10^4");
  const double vol_root = std::sqrt(4.0 * std::numbers::pi);
  auto ratio = [&](long long m) {
    const auto& e = table.entries[static_cast<size_t>(m * m - 1)];
    return e.value / static_cast<double>(m) / vol_root;
  };
  const long long M = isqrt(table.p_max);
  return 2.0 * ratio(M) - ratio(M / 2);
}

double weyl_constant_all_p(const WidthTable& table) {
  if (table.p_max < 10000) fail(ErrorKind::TableTooSmall, "the Weyl limit needs p_max >= 10^4");
  const double vol_root = std::sqrt(4.0 * std::numbers::pi);
  double sum = 0.0;
  long long n = 0;
  for (long long p = table.p_max / 2 + 1; p <= table.p_max; ++p, ++n)
    sum += table.entries[static_cast<size_t>(p - 1)].value / std::sqrt(static_cast<double>(p));
  return sum / static_cast<double>(n) / vol_root;
}

}  // namespace pwidths
