#include "freewalk/series_engine.hpp"

#include <algorithm>
#include <cmath>

#include "freewalk/errors.hpp"
#include "freewalk/power_series.hpp"

namespace freewalk {

namespace {

template <class T>
std::vector<T> phi_from_green_series(const std::vector<T>& g, int N) {
  using namespace series;
  if (g.empty() || g[0] == T(0))
    raise(errc::reversion_failure, "factor series has zero constant term");
  const std::vector<T> w = shift_up(g, N);  // w(z) = z G(z)
  const std::vector<T> v = revert(w, N);
  return compose(truncate(g, N), v, N);
}

template <class T>
std::vector<T> combine_phi(const std::vector<T>& phi1, const std::vector<T>& phi2,
                           const T& a1, const T& a2, int N) {
  std::vector<T> out(static_cast<size_t>(N) + 1, T(0));
  T p1 = T(1), p2 = T(1);
  for (int k = 0; k <= N; ++k) {
    out[static_cast<size_t>(k)] = p1 * phi1[static_cast<size_t>(k)] + p2 * phi2[static_cast<size_t>(k)];
    p1 *= a1;
    p2 *= a2;
  }
  out[0] -= T(1);
  return out;
}

// Newton for g = Phi(z g), doubling the truncation order each round. The
// correction operator is 1 - z Phi'(z g), invertible since its constant term
// is 1.
template <class T>
std::vector<T> solve_implicit(const std::vector<T>& phi, int N) {
  using namespace series;
  const std::vector<T> dphi = derivative(phi);
  std::vector<T> g = {phi[0]};  // g(0) = Phi(0) = 1
  int order = 0;
  while (order < N) {
    order = std::min(std::max(1, 2 * order), N);
    const auto zg = shift_up(g, order);
    const auto A = compose(truncate(phi, order), zg, order);
    const auto Ap = compose(truncate(dphi, order), zg, order);
    // num = g - Phi(zg); den = 1 - z Phi'(zg)
    auto num = sub(truncate(g, order), A);
    auto den = shift_up(Ap, order);
    for (auto& v : den) v = -v;
    den[0] += T(1);
    const auto corr = divide(num, den, order);
    g = truncate(g, order);
    for (int k = 0; k <= order; ++k) g[static_cast<size_t>(k)] -= corr[static_cast<size_t>(k)];
    if constexpr (is_double_v<T>) {
      double cmax = 0.0, gmax = 0.0;
      for (double v : corr) cmax = std::max(cmax, std::abs(v));
      for (double v : g) {
        if (!std::isfinite(v) || std::abs(v) > 1e10)
          raise(errc::no_convergence, "series solve diverges (scale beyond radius)");
        gmax = std::max(gmax, std::abs(v));
      }
      // below the noise floor the remaining coefficients are unresolvable;
      // freeze instead of amplifying rounding noise
      if (!(cmax > 1e-15 * std::max(gmax, 1e-300))) break;
    }
  }
  return truncate(g, N);
}

// ---------------------------------------------------------------------------
// Float route: coupled subordination solve. The series zeta~_i(z) defined by
// zeta~_i G_i(zeta~_i) = alpha_i z g(z) have nonnegative coefficients with
// zeta~_i(1) = zeta_i(rho) <= 1, so every composition in the Newton iteration
// runs over positive sub-unit series and rounding noise never amplifies.
// Unknowns x_i = zeta~_i; g is recovered as G_1(x_1) + G_2(x_2) - 1.
// ---------------------------------------------------------------------------

std::vector<double> solve_coupled(const FreeProductConfig& cfg, int N, double rho,
                                  const SeriesEngineOptions& opt) {
  using namespace series;
  const auto G1 = return_series(cfg.factor1, N, opt.conv).c;
  const auto G2 = return_series(cfg.factor2, N, opt.conv).c;
  const auto dG1 = derivative(G1);
  const auto dG2 = derivative(G2);
  const double a1 = cfg.alpha * rho;
  const double a2 = (1.0 - cfg.alpha) * rho;

  std::vector<double> x1 = {0.0, a1};
  std::vector<double> x2 = {0.0, a2};
  int order = 1;
  while (order < N) {
    const int m = std::min(2 * order, N);
    x1 = truncate(x1, m);
    x2 = truncate(x2, m);
    auto [h1, dh1] = compose_pair(truncate(G1, m), truncate(dG1, m), x1, m);
    auto [h2, dh2] = compose_pair(truncate(G2, m), truncate(dG2, m), x2, m);
    // g = h1 + h2 - 1
    std::vector<double> g = add(h1, h2);
    g[0] -= 1.0;
    // residuals E_i = x_i h_i - a_i z g
    auto E1 = sub(mul_trunc(x1, h1, m), scale(shift_up(g, m), a1));
    auto E2 = sub(mul_trunc(x2, h2, m), scale(shift_up(g, m), a2));
    // Jacobian blocks (2x2 over series):
    //  d E_i / d x_i = h_i + x_i G_i' (x_i) - a_i z G_i'(x_i)
    //  d E_i / d x_j = -a_i z G_j'(x_j)
    auto A = sub(add(h1, mul_trunc(x1, dh1, m)), scale(shift_up(dh1, m), a1));
    auto D = sub(add(h2, mul_trunc(x2, dh2, m)), scale(shift_up(dh2, m), a2));
    auto B = scale(shift_up(dh2, m), -a1);
    auto C = scale(shift_up(dh1, m), -a2);
    auto det = sub(mul_trunc(A, D, m), mul_trunc(B, C, m));
    auto d1 = divide(sub(mul_trunc(E1, D, m), mul_trunc(E2, B, m)), det, m);
    auto d2 = divide(sub(mul_trunc(E2, A, m), mul_trunc(E1, C, m)), det, m);
    double dmax = 0.0, xmax = 0.0;
    for (int k = 0; k <= m; ++k) {
      x1[static_cast<size_t>(k)] -= d1[static_cast<size_t>(k)];
      x2[static_cast<size_t>(k)] -= d2[static_cast<size_t>(k)];
      dmax = std::max({dmax, std::abs(d1[static_cast<size_t>(k)]), std::abs(d2[static_cast<size_t>(k)])});
      xmax = std::max({xmax, std::abs(x1[static_cast<size_t>(k)]), std::abs(x2[static_cast<size_t>(k)])});
    }
    x1[0] = 0.0;
    x2[0] = 0.0;
    for (int k = 0; k <= m; ++k) {
      const double v1 = x1[static_cast<size_t>(k)];
      const double v2 = x2[static_cast<size_t>(k)];
      if (!std::isfinite(v1) || !std::isfinite(v2) || std::abs(v1) > 10.0 || std::abs(v2) > 10.0)
        raise(errc::no_convergence, "series solve diverges (scale beyond radius)");
    }
    order = m;
    // below the noise floor the remaining coefficients are unresolvable
    if (!(dmax > 1e-15 * std::max(xmax, 1e-300))) break;
  }
  // the subordination sums must stay inside the factor walks' unit radius,
  // otherwise rho exceeded R between the coefficient growth guards
  double s1 = 0.0, s2 = 0.0;
  for (double v : x1) s1 += v;
  for (double v : x2) s2 += v;
  if (!(s1 < 1.0 + 1e-9) || !(s2 < 1.0 + 1e-9))
    raise(errc::no_convergence, "subordination series exit the unit disk");

  x1 = series::truncate(x1, N);
  x2 = series::truncate(x2, N);
  auto hf1 = compose(G1, x1, N);
  auto hf2 = compose(G2, x2, N);
  std::vector<double> g = add(hf1, hf2);
  g[0] -= 1.0;
  return g;
}

// Exponential drift of a rescaled run: fit log chat_n = a + s n - beta ln n
// over the trailing half, so s estimates log(rho / R) without the polynomial
// factor biasing it. Returns false when too little of the tail is resolved.
bool tail_drift(const std::vector<double>& chat, double& slope) {
  const int N = static_cast<int>(chat.size()) - 1;
  double s0 = 0, s1 = 0, s2 = 0, sl = 0, sll = 0, s1l = 0, sy = 0, s1y = 0, sly = 0;
  int m = 0;
  for (int n = N / 2; n <= N; ++n) {
    const double c = chat[static_cast<size_t>(n)];
    if (c <= 0.0) continue;
    const double x1 = n, x2 = std::log(static_cast<double>(n)), y = std::log(c);
    s0 += 1; s1 += x1; s2 += x1 * x1;
    sl += x2; sll += x2 * x2; s1l += x1 * x2;
    sy += y; s1y += x1 * y; sly += x2 * y;
    ++m;
  }
  if (m < 32) return false;
  // normal equations for [a, s, b] against regressors [1, n, ln n]
  double A[3][4] = {{s0, s1, sl, sy}, {s1, s2, s1l, s1y}, {sl, s1l, sll, sly}};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int rr = col + 1; rr < 3; ++rr)
      if (std::abs(A[rr][col]) > std::abs(A[piv][col])) piv = rr;
    std::swap(A[col], A[piv]);
    if (std::abs(A[col][col]) < 1e-12) return false;
    for (int rr = 0; rr < 3; ++rr) {
      if (rr == col) continue;
      const double f = A[rr][col] / A[col][col];
      for (int cc = col; cc < 4; ++cc) A[rr][cc] -= f * A[col][cc];
    }
  }
  slope = A[1][3] / A[1][1];
  return true;
}


}  // namespace

CoefficientSeries series_from_factor(const FactorMeasure& m, int N,
                                     const SeriesEngineOptions& opt) {
  return return_series(m, N, opt.conv);
}

std::vector<double> phi_series(const FactorMeasure& m, int N,
                               const SeriesEngineOptions& opt) {
  const CoefficientSeries g = return_series(m, N, opt.conv);
  return phi_from_green_series(g.c, N);
}

std::vector<mpq_class> phi_series_exact(const FactorMeasure& m, int N,
                                        const SeriesEngineOptions& opt) {
  if (N > opt.rational_cap)
    raise(errc::budget_exceeded, "rational mode capped at N = " +
                                     std::to_string(opt.rational_cap));
  const auto g = return_series_exact(m, N, opt.conv);
  return phi_from_green_series(g, N);
}

CoefficientSeries green_series_freeprod(const FreeProductConfig& cfg, int N,
                                        const SeriesEngineOptions& opt) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    raise(errc::bad_config, "alpha must lie in (0, 1)");
  CoefficientSeries out;
  out.radius_hint = 1.0;

  // Values below the double error floor are indistinguishable from zero and
  // may come back as tiny negatives; clamp so return series stay probabilities.
  const auto clamp = [](std::vector<double>& c) {
    for (double& v : c) v = std::min(std::max(v, 0.0), 1.0);
  };
  const auto unfold = [&](const std::vector<double>& gt, double rho) {
    std::vector<double> c(gt.size());
    double rn = 1.0;
    for (size_t n = 0; n < gt.size(); ++n) {
      c[n] = gt[n] * rn;
      rn /= rho;
    }
    return c;
  };

  const int n0 = std::min(N, 256);
  std::vector<double> head = solve_coupled(cfg, n0, 1.0, opt);
  if (N <= 400) {
    if (N > n0) head = solve_coupled(cfg, N, 1.0, opt);
    clamp(head);
    out.c = std::move(head);
    return out;
  }

  // Deep truncations run in the rescaled variable z / rho with rho just
  // inside the radius, keeping the tail coefficients resolvable. First guess
  // from the resolved ratios of the raw head; shrink geometrically while the
  // solve diverges; refine once from the measured tail drift.
  double rho = 1.0;
  {
    int hi = 8;
    for (int n = 8; n <= n0; ++n)
      if (head[static_cast<size_t>(n)] > 1e-6) hi = n;
    if (hi >= 24 && head[static_cast<size_t>(hi)] > 0 && head[static_cast<size_t>(hi / 2)] > 0)
      rho = std::pow(head[static_cast<size_t>(hi / 2)] / head[static_cast<size_t>(hi)],
                     1.0 / (hi - hi / 2));
    rho = std::max(1.0, rho * (1.0 - 5e-3));
  }

  std::vector<double> ghat;
  bool refined = false;
  bool solved = false;
  for (int attempt = 0; attempt < 16 && !solved; ++attempt) {
    try {
      ghat = solve_coupled(cfg, N, rho, opt);
      solved = true;
      double drift = 0.0;
      if (!refined && tail_drift(ghat, drift) && drift < -1.5e-3) {
        refined = true;
        const double better = rho * std::exp(-drift) * (1.0 - 5e-4);
        if (better > rho * (1.0 + 1e-4)) {
          try {
            auto trial = solve_coupled(cfg, N, better, opt);
            ghat = std::move(trial);
            rho = better;
          } catch (const Error&) {
            // keep the bounded run
          }
        }
      }
    } catch (const Error&) {
      if (rho <= 1.0 + 1e-9)
        raise(errc::no_convergence, "series solve diverges even unscaled");
      rho = std::max(1.0, 1.0 + 0.7 * (rho - 1.0));
    }
  }
  if (!solved) raise(errc::no_convergence, "series scale search failed");

  out.c = unfold(ghat, rho);
  clamp(out.c);
  out.radius_hint = rho;
  return out;
}

std::vector<mpq_class> green_series_freeprod_exact(const FreeProductConfig& cfg,
                                                   int N,
                                                   const SeriesEngineOptions& opt) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    raise(errc::bad_config, "alpha must lie in (0, 1)");
  const mpq_class a1(cfg.alpha);  // exact binary rational
  const mpq_class a2 = mpq_class(1) - a1;
  const auto phi1 = phi_series_exact(cfg.factor1, N, opt);
  const auto phi2 = phi_series_exact(cfg.factor2, N, opt);
  const auto phi = combine_phi(phi1, phi2, a1, a2, N);
  return solve_implicit(phi, N);
}

QnSequence qn_sequence(const CoefficientSeries& c, double R, int burn_in) {
  QnSequence out;
  out.burn_in = std::min<int>(burn_in, c.order());
  out.q.resize(c.c.size());
  double rn = 1.0;
  for (size_t n = 0; n < c.c.size(); ++n) {
    out.q[n] = c.c[n] * rn;
    rn *= R;
  }
  for (size_t n = static_cast<size_t>(out.burn_in); n + 1 < out.q.size(); ++n)
    if (out.q[n + 1] > out.q[n]) ++out.monotone_violations;
  out.eventually_monotone = out.monotone_violations == 0;
  return out;
}

}  // namespace freewalk
