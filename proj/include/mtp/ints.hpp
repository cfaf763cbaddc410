// mtp :: arbitrary-precision integer alias and small numeric helpers
#ifndef MTP_INTS_HPP
#define MTP_INTS_HPP

#include <boost/multiprecision/cpp_int.hpp>

namespace mtp {

using Int = boost::multiprecision::cpp_int;

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

inline Int gcd_int(Int a, Int b) {
  a = abs_int(a);
  b = abs_int(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline Int lcm_int(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  return abs_int(a / gcd_int(a, b) * b);
}

// floor division/modulus with positive remainder, the semantics used by
// \div and % on integers (divisor must be positive).
inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

inline Int floor_mod(const Int& a, const Int& b) { return a - b * floor_div(a, b); }

}  // namespace mtp

#endif
