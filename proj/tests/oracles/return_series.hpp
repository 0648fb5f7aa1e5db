#pragma once

// g_{Z^3}(0,0) as the expected number of visits to the origin,
// sum_m P(X_{2m} = 0). Returns are counted exactly by
//   P(X_{2m} = 0) = C(2m,m)/4^m * a_m / 9^m,  a_m = sum_{j+k+l=m} (m!/(j!k!l!))^2,
// with a_m generated by its three-term recurrence and the tail beyond M
// replaced by the m^{-3/2} asymptotic matched at M.

#include <cmath>
#include <cstdint>

namespace zagff::oracle {

/// a_m / 9^m by brute force over compositions; for cross-checking the recurrence.
inline long double scaled_multinomial_square_sum(int m) {
  long double total = 0.0L;
  for (int j = 0; j <= m; ++j) {
    for (int k = 0; j + k <= m; ++k) {
      const int l = m - j - k;
      const long double log_term = std::lgamma(m + 1.0L) - std::lgamma(j + 1.0L) - std::lgamma(k + 1.0L) -
                                   std::lgamma(l + 1.0L);
      total += std::exp(2.0L * log_term - m * std::log(9.0L));
    }
  }
  return total;
}

struct ReturnSeries {
  long double partial_sum = 0.0L;
  long double tail = 0.0L;
  long double value() const { return partial_sum + tail; }
};

inline ReturnSeries green_origin_d3_series(std::int64_t terms) {
  ReturnSeries s;
  long double central = 1.0L;  // C(2m,m)/4^m
  long double b_prev = 0.0L;   // a_{m-2}/9^{m-2}
  long double b = 1.0L;        // a_{m-1}/9^{m-1}
  s.partial_sum = 1.0L;        // m = 0
  long double p_last = 1.0L;
  for (std::int64_t m = 1; m <= terms; ++m) {
    const auto mm = static_cast<long double>(m);
    // m^2 a_m = (10m^2 - 10m + 3) a_{m-1} - 9 (m-1)^2 a_{m-2}, rescaled by 9^m.
    const long double next =
        ((10.0L * mm * mm - 10.0L * mm + 3.0L) * b - (mm - 1.0L) * (mm - 1.0L) * b_prev) / (9.0L * mm * mm);
    b_prev = b;
    b = next;
    central *= (2.0L * mm - 1.0L) / (2.0L * mm);
    p_last = central * b;
    s.partial_sum += p_last;
  }
  // p_{2m} ~ K m^{-3/2}; K matched at m = terms; sum_{m>M} m^{-3/2} ~ 2/sqrt(M + 1/2).
  const auto big_m = static_cast<long double>(terms);
  const long double k = p_last * std::pow(big_m, 1.5L);
  s.tail = k * 2.0L / std::sqrt(big_m + 0.5L);
  return s;
}

}  // namespace zagff::oracle
