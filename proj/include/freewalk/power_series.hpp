#pragma once

#include <gmpxx.h>

#include <cmath>
#include <type_traits>
#include <vector>

#include "freewalk/errors.hpp"

// Truncated power-series arithmetic over double or exact rationals.
// Everything is dense, coefficients c[0..N]; double products accumulate with
// Neumaier compensation.
namespace freewalk::series {

template <class T>
inline constexpr bool is_double_v = std::is_same_v<T, double>;

template <class T>
std::vector<T> mul_trunc(const std::vector<T>& a, const std::vector<T>& b, int N) {
  std::vector<T> out(static_cast<size_t>(N) + 1, T(0));
  const int na = static_cast<int>(a.size()) - 1;
  const int nb = static_cast<int>(b.size()) - 1;
  for (int k = 0; k <= N; ++k) {
    const int lo = std::max(0, k - nb);
    const int hi = std::min(k, na);
    if constexpr (is_double_v<T>) {
      double acc = 0.0, comp = 0.0;
      for (int i = lo; i <= hi; ++i) {
        const double term = a[static_cast<size_t>(i)] * b[static_cast<size_t>(k - i)];
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
      }
      out[static_cast<size_t>(k)] = acc;
    } else {
      T acc(0);
      for (int i = lo; i <= hi; ++i)
        acc += a[static_cast<size_t>(i)] * b[static_cast<size_t>(k - i)];
      out[static_cast<size_t>(k)] = acc;
    }
  }
  return out;
}

template <class T>
std::vector<T> add(std::vector<T> a, const std::vector<T>& b) {
  if (a.size() < b.size()) a.resize(b.size(), T(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

template <class T>
std::vector<T> sub(std::vector<T> a, const std::vector<T>& b) {
  if (a.size() < b.size()) a.resize(b.size(), T(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  return a;
}

template <class T>
std::vector<T> scale(std::vector<T> a, const T& s) {
  for (T& v : a) v *= s;
  return a;
}

template <class T>
std::vector<T> truncate(std::vector<T> a, int N) {
  a.resize(static_cast<size_t>(N) + 1, T(0));
  return a;
}

// multiply by z (shift up one degree)
template <class T>
std::vector<T> shift_up(const std::vector<T>& a, int N) {
  std::vector<T> out(static_cast<size_t>(N) + 1, T(0));
  for (int k = 1; k <= N; ++k)
    if (k - 1 < static_cast<int>(a.size())) out[static_cast<size_t>(k)] = a[static_cast<size_t>(k - 1)];
  return out;
}

template <class T>
std::vector<T> derivative(const std::vector<T>& a) {
  if (a.size() <= 1) return {T(0)};
  std::vector<T> out(a.size() - 1);
  for (size_t k = 1; k < a.size(); ++k) out[k - 1] = T(static_cast<long>(k)) * a[k];
  return out;
}

// num / den with den[0] != 0, by long division.
template <class T>
std::vector<T> divide(const std::vector<T>& num, const std::vector<T>& den, int N) {
  if (den.empty() || den[0] == T(0))
    raise(errc::domain_error, "series division by a series with zero constant term");
  std::vector<T> q(static_cast<size_t>(N) + 1, T(0));
  for (int k = 0; k <= N; ++k) {
    T acc = (k < static_cast<int>(num.size())) ? num[static_cast<size_t>(k)] : T(0);
    const int hi = std::min<int>(k, static_cast<int>(den.size()) - 1);
    for (int j = 1; j <= hi; ++j) acc -= den[static_cast<size_t>(j)] * q[static_cast<size_t>(k - j)];
    q[static_cast<size_t>(k)] = acc / den[0];
  }
  return q;
}

// a(b(z)) with b(0) = 0, Brent-Kung baby-step/giant-step: ~2 sqrt(N) full
// multiplications instead of N.
template <class T>
std::vector<T> compose(const std::vector<T>& a, const std::vector<T>& b, int N) {
  if (!b.empty() && b[0] != T(0))
    raise(errc::domain_error, "composition requires zero constant inner term");
  const int n = N + 1;
  const int s = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
  const int blocks = (static_cast<int>(a.size()) + s - 1) / s;

  // powers b^0 .. b^s
  std::vector<std::vector<T>> pw(static_cast<size_t>(s) + 1);
  pw[0] = {T(1)};
  for (int i = 1; i <= s; ++i) pw[static_cast<size_t>(i)] = mul_trunc(pw[static_cast<size_t>(i - 1)], b, N);
  const std::vector<T>& giant = pw[static_cast<size_t>(s)];

  std::vector<T> result(static_cast<size_t>(N) + 1, T(0));
  for (int j = blocks - 1; j >= 0; --j) {
    // block_j(b) = sum_i a[j s + i] b^i
    std::vector<T> blk(static_cast<size_t>(N) + 1, T(0));
    for (int i = 0; i < s; ++i) {
      const size_t idx = static_cast<size_t>(j) * s + static_cast<size_t>(i);
      if (idx >= a.size()) break;
      const T& coef = a[idx];
      if (coef == T(0)) continue;
      const auto& p = pw[static_cast<size_t>(i)];
      for (size_t k = 0; k < p.size() && k <= static_cast<size_t>(N); ++k)
        blk[k] += coef * p[k];
    }
    if (j == blocks - 1)
      result = std::move(blk);
    else
      result = add(mul_trunc(result, giant, N), blk);
  }
  return result;
}

// Two compositions a1(b), a2(b) sharing the inner power table (Brent-Kung
// giant steps are the dominant cost and depend only on b).
template <class T>
std::pair<std::vector<T>, std::vector<T>> compose_pair(const std::vector<T>& a1,
                                                       const std::vector<T>& a2,
                                                       const std::vector<T>& b, int N) {
  if (!b.empty() && b[0] != T(0))
    raise(errc::domain_error, "composition requires zero constant inner term");
  const int n = N + 1;
  const int s = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
  std::vector<std::vector<T>> pw(static_cast<size_t>(s) + 1);
  pw[0] = {T(1)};
  for (int i = 1; i <= s; ++i) pw[static_cast<size_t>(i)] = mul_trunc(pw[static_cast<size_t>(i - 1)], b, N);
  const std::vector<T>& giant = pw[static_cast<size_t>(s)];

  const auto eval = [&](const std::vector<T>& a) {
    const int blocks = (static_cast<int>(a.size()) + s - 1) / s;
    std::vector<T> result(static_cast<size_t>(N) + 1, T(0));
    for (int j = blocks - 1; j >= 0; --j) {
      std::vector<T> blk(static_cast<size_t>(N) + 1, T(0));
      for (int i = 0; i < s; ++i) {
        const size_t idx = static_cast<size_t>(j) * s + static_cast<size_t>(i);
        if (idx >= a.size()) break;
        const T& coef = a[idx];
        if (coef == T(0)) continue;
        const auto& p = pw[static_cast<size_t>(i)];
        for (size_t k = 0; k < p.size() && k <= static_cast<size_t>(N); ++k)
          blk[k] += coef * p[k];
      }
      if (j == blocks - 1)
        result = std::move(blk);
      else
        result = add(mul_trunc(result, giant, N), blk);
    }
    return result;
  };
  return {eval(a1), eval(a2)};
}

// Functional inverse: v with w(v(t)) = t mod t^{N+1}; needs w(0) = 0 and
// w'(0) != 0. Newton iteration with doubling truncation order.
template <class T>
std::vector<T> revert(const std::vector<T>& w, int N) {
  if (w.size() < 2 || w[0] != T(0) || w[1] == T(0))
    raise(errc::reversion_failure, "reversion needs w(0) = 0, w'(0) != 0");
  std::vector<T> v = {T(0), T(1) / w[1]};
  const std::vector<T> wp = derivative(w);
  int order = 1;
  while (order < N) {
    order = std::min(2 * order, N);
    const auto w_of_v = compose(truncate(w, order), v, order);
    const auto wp_of_v = compose(truncate(wp, order), v, order);
    std::vector<T> num = w_of_v;
    if (num.size() < 2) num.resize(2, T(0));
    num[1] -= T(1);  // w(v) - t
    const auto corr = divide(num, wp_of_v, order);
    v = truncate(v, order);
    for (int k = 0; k <= order; ++k) v[static_cast<size_t>(k)] -= corr[static_cast<size_t>(k)];
    v[0] = T(0);
    if constexpr (is_double_v<T>) {
      // Once the correction reaches the noise floor, all remaining true
      // coefficients sit far below double resolution; iterating further only
      // amplifies rounding noise, so freeze and zero-extend instead.
      double cmax = 0.0, vmax = 0.0;
      for (double x : corr) cmax = std::max(cmax, std::abs(x));
      for (double x : v) vmax = std::max(vmax, std::abs(x));
      if (!(cmax > 1e-15 * std::max(vmax, 1e-300))) break;
    }
  }
  return truncate(v, N);
}

}  // namespace freewalk::series
