#pragma once

// Error-free float transforms used to make scheduling comparisons exact.
//
// Score ordering compares ratios S_a/c_a vs S_b/c_b by cross-multiplication,
// and objective comparisons reduce to the sign of sum(w_i * (a_i - b_i)).
// Both are evaluated exactly: products are split into (head, tail) pairs via
// fma, and the resulting term lists are summed as nonoverlapping expansions
// whose leading component carries the sign. A cheap double pre-filter keeps
// the exact path off the hot loop except for near-ties.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace dat::exactfp {

static_assert(std::numeric_limits<double>::is_iec559, "requires IEEE-754 doubles");

struct TwoFloat {
  double hi = 0.0;
  double lo = 0.0;
};

inline TwoFloat two_sum(double a, double b) {
  const double s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  return {s, (a - av) + (b - bv)};
}

inline TwoFloat two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

// Appends one term to a nonoverlapping expansion stored ascending by
// magnitude in e[0..n). Returns the new component count (n + 1).
inline int grow_expansion(double* e, int n, double b) {
  double q = b;
  for (int i = 0; i < n; ++i) {
    const TwoFloat t = two_sum(q, e[i]);
    e[i] = t.lo;
    q = t.hi;
  }
  e[n] = q;
  return n + 1;
}

// Sign of the exact sum of an expansion: the largest nonzero component.
inline int expansion_sign(const double* e, int n) {
  for (int i = n - 1; i >= 0; --i) {
    if (e[i] > 0.0) return 1;
    if (e[i] < 0.0) return -1;
  }
  return 0;
}

// Exact sign of a + b + c + d.
inline int sign_of_sum4(double a, double b, double c, double d) {
  double e[4];
  int n = 0;
  n = grow_expansion(e, n, a);
  n = grow_expansion(e, n, b);
  n = grow_expansion(e, n, c);
  n = grow_expansion(e, n, d);
  return expansion_sign(e, n);
}

// Exact sign of sa*ca' - sb*cb' written for ratio comparison:
// sign(sa/ca - sb/cb) with positive denominators == sign(sa*cb - sb*ca).
inline int compare_ratio(double sa, double ca, double sb, double cb) {
  const double x = sa * cb;
  const double y = sb * ca;
  const double margin =
      4.0 * std::numeric_limits<double>::epsilon() * (std::fabs(x) + std::fabs(y));
  if (x - y > margin) return 1;
  if (y - x > margin) return -1;
  const TwoFloat px = two_prod(sa, cb);
  const TwoFloat py = two_prod(sb, ca);
  return sign_of_sum4(px.hi, px.lo, -py.hi, -py.lo);
}

// Exact sign of sum(w_i * (a_i - b_i)). Used to compare two weighted
// objective vectors sharing the weight vector w.
inline int compare_weighted(std::span<const double> w, std::span<const double> a,
                            std::span<const double> b) {
  const std::size_t n = w.size();
  double approx = 0.0;
  double mag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ta = w[i] * a[i];
    const double tb = w[i] * b[i];
    approx += ta - tb;
    mag += std::fabs(ta) + std::fabs(tb);
  }
  const double margin =
      8.0 * static_cast<double>(n + 1) * std::numeric_limits<double>::epsilon() * mag;
  if (approx > margin) return 1;
  if (approx < -margin) return -1;

  std::vector<double> e(4 * n + 4);
  int m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const TwoFloat pa = two_prod(w[i], a[i]);
    const TwoFloat pb = two_prod(w[i], b[i]);
    if (pa.hi != 0.0) m = grow_expansion(e.data(), m, pa.hi);
    if (pa.lo != 0.0) m = grow_expansion(e.data(), m, pa.lo);
    if (pb.hi != 0.0) m = grow_expansion(e.data(), m, -pb.hi);
    if (pb.lo != 0.0) m = grow_expansion(e.data(), m, -pb.lo);
  }
  return expansion_sign(e.data(), m);
}

}  // namespace dat::exactfp
