#include "freewalk/conv_series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "freewalk/errors.hpp"

namespace freewalk {

namespace {

// ---------------------------------------------------------------------------
// Axis route. Steps pick the origin with weight a or axis j with weight 2b_j,
// then a fair sign. Conditioning on the axis step counts gives
//   c_n = sum_k Binom(n, k; 1-a) * V(k),
// where V(k) is the probability that k steps split over the axes all return,
// i.e. the normalized coefficient of the I_0 product. V decays only
// polynomially, so everything stays in double range as long as the binomial
// pmf is expanded outward from its mode.
// ---------------------------------------------------------------------------

// pmf(i) = C(s, i) p^i (1-p)^(s-i), evaluated around the mode so that tails
// underflow harmlessly to zero.
std::vector<double> binomial_pmf(int s, double p) {
  std::vector<double> pmf(static_cast<size_t>(s) + 1, 0.0);
  if (s == 0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p >= 1.0) {
    pmf[static_cast<size_t>(s)] = 1.0;
    return pmf;
  }
  const double q = 1.0 - p;
  const int mode = std::clamp(static_cast<int>((s + 1) * p), 0, s);
  const double lg = std::lgamma(s + 1.0) - std::lgamma(mode + 1.0) -
                    std::lgamma(s - mode + 1.0) + mode * std::log(p) +
                    (s - mode) * std::log(q);
  pmf[static_cast<size_t>(mode)] = std::exp(lg);
  for (int i = mode; i < s; ++i)
    pmf[static_cast<size_t>(i) + 1] =
        pmf[static_cast<size_t>(i)] * ((s - i) * p) / ((i + 1.0) * q);
  for (int i = mode; i > 0; --i)
    pmf[static_cast<size_t>(i) - 1] =
        pmf[static_cast<size_t>(i)] * (i * q) / ((s - i + 1.0) * p);
  return pmf;
}

// Central binomial probabilities Q(2m) = C(2m, m) / 4^m.
std::vector<double> central_binomial(int N) {
  std::vector<double> q(static_cast<size_t>(N) + 1, 0.0);
  q[0] = 1.0;
  double v = 1.0;
  for (int m = 1; 2 * m <= N; ++m) {
    v *= (2.0 * m - 1.0) / (2.0 * m);
    q[static_cast<size_t>(2 * m)] = v;
  }
  return q;
}

CoefficientSeries axis_series(const FactorMeasure& m, int N) {
  const double a = m.origin_weight;
  const auto central = central_binomial(N);
  // V starts as the single-axis law and folds axes in one at a time.
  std::vector<double> V = central;
  double Bprev = m.axis_weights[0];
  for (size_t j = 1; j < m.axis_weights.size(); ++j) {
    const double bj = m.axis_weights[j];
    const double B = Bprev + bj;
    const double p = Bprev / B;  // share of earlier axes
    std::vector<double> next(static_cast<size_t>(N) + 1, 0.0);
    for (int s = 0; s <= N; s += 2) {
      const auto pmf = binomial_pmf(s, p);
      double acc = 0.0, comp = 0.0;
      for (int i = 0; i <= s; i += 2) {
        const double term = pmf[static_cast<size_t>(i)] * V[static_cast<size_t>(i)] *
                            central[static_cast<size_t>(s - i)];
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
      }
      next[static_cast<size_t>(s)] = acc;
    }
    V = std::move(next);
    Bprev = B;
  }
  CoefficientSeries out;
  out.c.assign(static_cast<size_t>(N) + 1, 0.0);
  if (a == 0.0) {
    for (int n = 0; n <= N; ++n) out.c[static_cast<size_t>(n)] = V[static_cast<size_t>(n)];
    return out;
  }
  for (int n = 0; n <= N; ++n) {
    const auto pmf = binomial_pmf(n, 1.0 - a);
    double acc = 0.0, comp = 0.0;
    for (int k = 0; k <= n; k += 2) {
      const double term = pmf[static_cast<size_t>(k)] * V[static_cast<size_t>(k)];
      const double y = term - comp;
      const double t = acc + y;
      comp = (t - acc) - y;
      acc = t;
    }
    out.c[static_cast<size_t>(n)] = acc;
  }
  return out;
}

std::vector<mpq_class> axis_series_exact(const FactorMeasure& m, int N) {
  // Exact weights for origin and axes.
  mpq_class a = 0;
  std::vector<mpq_class> b(m.axis_weights.size(), mpq_class(0));
  for (const Atom& atom : m.atoms) {
    int nz = -1;
    bool origin = true;
    for (int j = 0; j < m.dim; ++j)
      if (atom.x[static_cast<size_t>(j)] != 0) {
        origin = false;
        nz = j;
      }
    if (origin)
      a = atom.w;
    else if (atom.x[static_cast<size_t>(nz)] == 1)
      b[static_cast<size_t>(nz)] = atom.w;
  }

  std::vector<mpz_class> binom_cache;  // C(2m, m)
  binom_cache.reserve(static_cast<size_t>(N / 2) + 1);
  for (int mm = 0; 2 * mm <= N; ++mm) {
    mpz_class z;
    mpz_bin_uiui(z.get_mpz_t(), static_cast<unsigned long>(2 * mm),
                 static_cast<unsigned long>(mm));
    binom_cache.push_back(z);
  }
  auto P = [&](const mpq_class& bj, int k) -> mpq_class {
    if (k % 2) return mpq_class(0);
    mpq_class r(binom_cache[static_cast<size_t>(k / 2)]);
    mpq_class bk = 1;
    for (int i = 0; i < k; ++i) bk *= bj;
    return r * bk;
  };

  std::vector<mpq_class> W(static_cast<size_t>(N) + 1, mpq_class(0));
  for (int k = 0; k <= N; ++k) W[static_cast<size_t>(k)] = P(b[0], k);
  for (size_t j = 1; j < b.size(); ++j) {
    std::vector<mpq_class> next(static_cast<size_t>(N) + 1, mpq_class(0));
    for (int s = 0; s <= N; s += 2) {
      mpq_class acc = 0;
      for (int i = 0; i <= s; i += 2) {
        mpz_class cb;
        mpz_bin_uiui(cb.get_mpz_t(), static_cast<unsigned long>(s),
                     static_cast<unsigned long>(i));
        acc += mpq_class(cb) * W[static_cast<size_t>(i)] * P(b[j], s - i);
      }
      next[static_cast<size_t>(s)] = acc;
    }
    W = std::move(next);
  }
  std::vector<mpq_class> c(static_cast<size_t>(N) + 1, mpq_class(0));
  for (int n = 0; n <= N; ++n) {
    mpq_class acc = 0;
    mpq_class apow = 1;  // a^(n-k), built from k = n downward
    // iterate k descending so the origin power grows one factor at a time
    for (int k = n; k >= 0; --k) {
      if (k % 2 == 0 && W[static_cast<size_t>(k)] != 0) {
        mpz_class cb;
        mpz_bin_uiui(cb.get_mpz_t(), static_cast<unsigned long>(n),
                     static_cast<unsigned long>(k));
        acc += mpq_class(cb) * apow * W[static_cast<size_t>(k)];
      }
      apow *= a;
    }
    c[static_cast<size_t>(n)] = acc;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Dense box route (any finitely supported symmetric measure).
// ---------------------------------------------------------------------------

struct BoxGeometry {
  int dim;
  int L;  // coordinates in [-L, L]
  long side;
  long cells;
  std::vector<long> strides;
};

BoxGeometry box_geometry(const FactorMeasure& m, int N, std::size_t bytes_per_cell,
                         std::size_t cap) {
  int rmax = 0;
  for (const Atom& a : m.atoms)
    for (int v : a.x) rmax = std::max(rmax, std::abs(v));
  BoxGeometry g;
  g.dim = m.dim;
  g.L = ((N + 1) / 2 + 1) * rmax;
  g.side = 2l * g.L + 1;
  g.cells = 1;
  for (int j = 0; j < g.dim; ++j) {
    if (g.cells > static_cast<long>(1e18) / g.side)
      raise(errc::budget_exceeded, "convolution box overflows addressing");
    g.cells *= g.side;
  }
  const double need = 2.0 * static_cast<double>(g.cells) * static_cast<double>(bytes_per_cell);
  if (need > static_cast<double>(cap))
    raise(errc::budget_exceeded,
          "convolution box needs " + std::to_string(need / (1 << 20)) + " MiB");
  g.strides.assign(static_cast<size_t>(g.dim), 1);
  for (int j = g.dim - 2; j >= 0; --j)
    g.strides[static_cast<size_t>(j)] = g.strides[static_cast<size_t>(j) + 1] * g.side;
  return g;
}

template <class T>
void box_step(const BoxGeometry& g, const FactorMeasure& m,
              const std::vector<T>& in, std::vector<T>& out, int reach,
              bool exact) {
  std::fill(out.begin(), out.end(), T(0));
  // offsets of atoms in the flat indexing
  std::vector<long> offs;
  std::vector<T> ws;
  for (const Atom& a : m.atoms) {
    long off = 0;
    for (int j = 0; j < g.dim; ++j) off += a.x[static_cast<size_t>(j)] * g.strides[static_cast<size_t>(j)];
    offs.push_back(off);
    if constexpr (std::is_same_v<T, double>)
      ws.push_back(a.wd);
    else
      ws.push_back(a.w);
  }
  (void)exact;
  // iterate the sub-box that can be populated after this step
  std::vector<int> coord(static_cast<size_t>(g.dim), -reach);
  while (true) {
    long idx = 0;
    for (int j = 0; j < g.dim; ++j)
      idx += (coord[static_cast<size_t>(j)] + g.L) * g.strides[static_cast<size_t>(j)];
    T acc(0);
    for (size_t t = 0; t < offs.size(); ++t) acc += ws[t] * in[static_cast<size_t>(idx - offs[t])];
    out[static_cast<size_t>(idx)] = acc;
    int j = g.dim - 1;
    while (j >= 0 && ++coord[static_cast<size_t>(j)] > reach) coord[static_cast<size_t>(j--)] = -reach;
    if (j < 0) break;
  }
}

template <class T>
std::vector<T> box_series(const FactorMeasure& m, int N, std::size_t cap) {
  const BoxGeometry g = box_geometry(m, N, sizeof(T) == 8 ? 8 : 40, cap);
  int rmax = 0;
  for (const Atom& a : m.atoms)
    for (int v : a.x) rmax = std::max(rmax, std::abs(v));

  std::vector<T> cur(static_cast<size_t>(g.cells), T(0));
  std::vector<T> nxt(static_cast<size_t>(g.cells), T(0));
  long center = 0;
  for (int j = 0; j < g.dim; ++j) center += g.L * g.strides[static_cast<size_t>(j)];
  cur[static_cast<size_t>(center)] = T(1);

  std::vector<T> c(static_cast<size_t>(N) + 1, T(0));
  c[0] = T(1);
  const int M = (N + 1) / 2;
  for (int m_step = 0; m_step < M; ++m_step) {
    const int reach = std::min((m_step + 1) * rmax, g.L);
    box_step(g, m, cur, nxt, reach, !std::is_same_v<T, double>);
    // c_{2m+1} = <p_m, p_{m+1}>, c_{2m+2} = <p_{m+1}, p_{m+1}>
    if (2 * m_step + 1 <= N) {
      T acc(0);
      for (long i = 0; i < g.cells; ++i) acc += cur[static_cast<size_t>(i)] * nxt[static_cast<size_t>(i)];
      c[static_cast<size_t>(2 * m_step + 1)] = acc;
    }
    if (2 * m_step + 2 <= N) {
      T acc(0);
      for (long i = 0; i < g.cells; ++i) acc += nxt[static_cast<size_t>(i)] * nxt[static_cast<size_t>(i)];
      c[static_cast<size_t>(2 * m_step + 2)] = acc;
    }
    std::swap(cur, nxt);
  }
  return c;
}

}  // namespace

CoefficientSeries return_series(const FactorMeasure& m, int N,
                                const SeriesOptions& opt) {
  if (N < 0) raise(errc::domain_error, "negative truncation order");
  if (m.axis_affine && !opt.force_box) {
    CoefficientSeries s = axis_series(m, N);
    s.radius_hint = m.radius_conv;
    return s;
  }
  CoefficientSeries s;
  auto c = box_series<double>(m, N, opt.memory_cap_bytes);
  s.c = std::move(c);
  s.radius_hint = m.radius_conv;
  return s;
}

std::vector<mpq_class> return_series_exact(const FactorMeasure& m, int N,
                                           const SeriesOptions& opt) {
  if (N < 0) raise(errc::domain_error, "negative truncation order");
  if (m.axis_affine && !opt.force_box) return axis_series_exact(m, N);
  return box_series<mpq_class>(m, N, opt.memory_cap_bytes);
}

}  // namespace freewalk
