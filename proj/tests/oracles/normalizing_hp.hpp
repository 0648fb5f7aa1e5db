#pragma once

// Normalizing constants re-evaluated in 50-digit binary floating point.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cstdint>

namespace zagff::oracle {

using Float50 = boost::multiprecision::cpp_bin_float_50;

struct ConstantsHp {
  Float50 b;
  Float50 a;
};

inline ConstantsHp normalizing_constants_hp(std::int64_t sites, const Float50& v) {
  using boost::multiprecision::log;
  using boost::multiprecision::sqrt;
  const Float50 pi = boost::math::constants::pi<Float50>();
  const Float50 log_n = log(Float50(sites));
  const Float50 root = sqrt(2 * log_n);
  ConstantsHp c;
  c.b = sqrt(v) * (root - (log(log_n) + log(4 * pi)) / (2 * root));
  c.a = v / c.b;
  return c;
}

}  // namespace zagff::oracle
