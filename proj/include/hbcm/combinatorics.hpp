#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace hbcm {

/// Exact, arbitrary-precision counter used for hyperedge counts.
using big_count = boost::multiprecision::cpp_int;

/// C(n, k) exactly.
inline big_count binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  big_count result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

/// 2^n - n - 1: the number of subsets of an n-set with at least two members.
inline big_count subsets_of_size_two_or_more(std::uint64_t n) {
  if (n < 2) return 0;
  big_count all = 1;
  all <<= n;
  return all - n - 1;
}

/// C(n, k) if it fits in 64 bits, otherwise 0 (callers treat 0 as "too large").
inline std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) return 0;
  }
  return static_cast<std::uint64_t>(result);
}

inline double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// log(sum(exp(v))) without overflow; -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> values) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

inline std::uint64_t smallest_prime_factor(std::uint64_t n) {
  if (n < 2) throw std::invalid_argument("smallest_prime_factor: n < 2");
  if (n % 2 == 0) return 2;
  for (std::uint64_t f = 3; f * f <= n; f += 2)
    if (n % f == 0) return f;
  return n;
}

inline bool is_prime(std::uint64_t n) { return n >= 2 && smallest_prime_factor(n) == n; }

/// Uniform k-subset of [0, n), Floyd's algorithm. Result is sorted.
template <typename Rng>
std::vector<std::uint64_t> floyd_sample(std::uint64_t n, std::uint64_t k, Rng& rng) {
  if (k > n) throw std::invalid_argument("floyd_sample: k > n");
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(k * 2);
  std::vector<std::uint64_t> out;
  out.reserve(k);
  for (std::uint64_t j = n - k; j < n; ++j) {
    std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
    if (chosen.insert(t).second) {
      out.push_back(t);
    } else {
      chosen.insert(j);
      out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Same as floyd_sample but writes 32-bit ids into a reusable buffer; uses a
/// linear-probe membership test on the (small) output for k <= 64.
template <typename Rng>
void floyd_sample_into(std::uint32_t n, std::uint32_t k, Rng& rng,
                       std::vector<std::uint32_t>& out) {
  out.clear();
  if (k > n) throw std::invalid_argument("floyd_sample: k > n");
  if (k > 64) {
    for (auto v : floyd_sample(n, k, rng)) out.push_back(static_cast<std::uint32_t>(v));
    return;
  }
  for (std::uint32_t j = n - k; j < n; ++j) {
    auto t = std::uniform_int_distribution<std::uint32_t>(0, j)(rng);
    bool seen = std::find(out.begin(), out.end(), t) != out.end();
    out.push_back(seen ? j : t);
  }
  std::sort(out.begin(), out.end());
}

/// The `rank`-th k-subset of [0, n) in colexicographic order (combinatorial
/// number system). Requires rank < C(n, k) and C(n, k) representable.
inline std::vector<std::uint32_t> unrank_combination(std::uint64_t rank, std::uint32_t n,
                                                     std::uint32_t k) {
  std::vector<std::uint32_t> out(k);
  std::uint32_t hi = n;
  for (std::uint32_t i = k; i >= 1; --i) {
    // largest c < hi with C(c, i) <= rank
    std::uint32_t c = i - 1;
    std::uint32_t lo_c = i - 1, hi_c = hi - 1;
    while (lo_c < hi_c) {
      std::uint32_t mid = lo_c + (hi_c - lo_c + 1) / 2;
      std::uint64_t b = binomial_u64(mid, i);
      bool fits = (b != 0 || mid < i) && b <= rank;
      if (fits)
        lo_c = mid;
      else
        hi_c = mid - 1;
    }
    c = lo_c;
    out[i - 1] = c;
    rank -= (c >= i) ? binomial_u64(c, i) : 0;
    hi = c;
  }
  return out;
}

}  // namespace hbcm
