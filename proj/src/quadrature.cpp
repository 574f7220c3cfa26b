#include "freewalk/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "freewalk/errors.hpp"

namespace freewalk {

namespace {

// QUADPACK 7-15 Gauss-Kronrod pair on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkEstimate {
  double kronrod;
  double err;
};

GkEstimate gk15(const std::function<double(double)>& f, double a, double b,
                long& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double sk = kWgk[7] * fc;
  double sg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    sk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) sg += kWg[j / 2] * (f1 + f2);
  }
  evals += 15;
  const double kron = sk * h;
  const double gauss = sg * h;
  // QUADPACK-style sharpened error estimate.
  double err = std::abs(kron - gauss);
  err = std::pow(200.0 * err, 1.5);
  const double scale = std::abs(kron) + 1e-300;
  if (err > scale) err = std::abs(kron - gauss);
  return {kron, std::max(err, std::abs(kron - gauss) * 1e-2)};
}

// Accepts a panel at the absolute budget or at ~1e-13 relative accuracy,
// whichever is looser; large integrals near a singular endpoint would
// otherwise chase an impossible absolute target.
constexpr double kPanelRelTol = 1e-13;

void adapt(const std::function<double(double)>& f, double a, double b,
           double tol, int depth, int max_depth, QuadResult& out) {
  const GkEstimate e = gk15(f, a, b, out.evals);
  if (e.err <= tol || e.err <= kPanelRelTol * std::abs(e.kronrod) ||
      depth >= max_depth || (b - a) < 1e-15 * (std::abs(a) + 1.0)) {
    out.value += e.kronrod;
    out.abserr += e.err;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * tol, depth + 1, max_depth, out);
  adapt(f, m, b, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace

QuadResult integrate_interval(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, int max_depth) {
  QuadResult out;
  if (a == b) return out;
  adapt(f, a, b, abs_tol, 0, max_depth, out);
  return out;
}

QuadResult integrate_halfline(const std::function<double(double)>& f,
                              double split, double abs_tol) {
  QuadResult head = integrate_interval(f, 0.0, split, 0.5 * abs_tol);
  const auto tail_f = [&](double v) {
    const double u = split / (v * v);
    return f(u) * 2.0 * split / (v * v * v);
  };
  QuadResult tail = integrate_interval(tail_f, 0.0, 1.0, 0.5 * abs_tol);
  QuadResult out;
  out.value = head.value + tail.value;
  out.abserr = head.abserr + tail.abserr;
  out.evals = head.evals + tail.evals;
  return out;
}

namespace {

struct Cell {
  std::array<double, 8> lo{};
  std::array<double, 8> hi{};
  double value = 0.0;
  double err = 0.0;
};

// Tensor Gauss-Legendre at two orders; the difference drives refinement.
constexpr std::array<double, 3> kGl5x = {0.0, 0.538469310105683, 0.906179845938664};
constexpr std::array<double, 3> kGl5w = {0.568888888888889, 0.478628670499366,
                                         0.236926885056189};
constexpr std::array<double, 4> kGl8x = {0.183434642495650, 0.525532409916329,
                                         0.796666477413627, 0.960289856497536};
constexpr std::array<double, 4> kGl8w = {0.362683783378362, 0.313706645877887,
                                         0.222381034453374, 0.101228536290376};

double tensor_gl(const std::function<double(const double*)>& f, const Cell& c,
                 int dim, bool fine, long& evals) {
  const int half = fine ? 4 : 3;
  std::array<double, 8> nodes{};
  std::array<double, 8> weights{};
  int n = 0;
  for (int i = 0; i < half; ++i) {
    const double x = fine ? kGl8x[i] : kGl5x[i];
    const double w = fine ? kGl8w[i] : kGl5w[i];
    if (!fine && i == 0) {
      nodes[n] = 0.0;
      weights[n++] = w;
    } else {
      nodes[n] = x;
      weights[n++] = w;
      nodes[n] = -x;
      weights[n++] = w;
    }
  }
  std::array<int, 8> idx{};
  std::array<double, 8> pt{};
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int k = 0; k < dim; ++k) {
      const double mid = 0.5 * (c.lo[k] + c.hi[k]);
      const double hw = 0.5 * (c.hi[k] - c.lo[k]);
      pt[k] = mid + hw * nodes[idx[k]];
      w *= hw * weights[idx[k]];
    }
    sum += w * f(pt.data());
    ++evals;
    int k = 0;
    while (k < dim && ++idx[k] == n) idx[k++] = 0;
    if (k == dim) break;
  }
  return sum;
}

void estimate_cell(const std::function<double(const double*)>& f, Cell& c,
                   int dim, long& evals) {
  const double coarse = tensor_gl(f, c, dim, false, evals);
  const double fine = tensor_gl(f, c, dim, true, evals);
  c.value = fine;
  c.err = std::abs(fine - coarse);
}

}  // namespace

QuadResult integrate_torus_even(const std::function<double(const double*)>& f,
                                int dim, double abs_tol, long max_evals) {
  if (dim < 1 || dim > 8) raise(errc::domain_error, "torus dimension out of range");
  QuadResult out;
  const double scale = std::ldexp(1.0, dim);  // 2^d mirror copies
  Cell root;
  for (int k = 0; k < dim; ++k) {
    root.lo[k] = 0.0;
    root.hi[k] = M_PI;
  }
  estimate_cell(f, root, dim, out.evals);

  // Worst-error-first refinement; insertion order breaks ties
  // deterministically.
  std::multimap<double, Cell, std::greater<double>> heap;
  heap.emplace(root.err, root);
  double total = root.value;
  double toterr = root.err;
  while (toterr * scale > abs_tol && out.evals < max_evals && !heap.empty()) {
    auto it = heap.begin();
    Cell cell = it->second;
    heap.erase(it);
    total -= cell.value;
    toterr -= cell.err;
    int axis = 0;
    double len = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double l = cell.hi[k] - cell.lo[k];
      if (l > len + 1e-18) {
        len = l;
        axis = k;
      }
    }
    if (len < 1e-12) {  // cannot refine further
      total += cell.value;
      toterr += cell.err;
      break;
    }
    Cell a = cell, b = cell;
    const double mid = 0.5 * (cell.lo[axis] + cell.hi[axis]);
    a.hi[axis] = mid;
    b.lo[axis] = mid;
    estimate_cell(f, a, dim, out.evals);
    estimate_cell(f, b, dim, out.evals);
    total += a.value + b.value;
    toterr += a.err + b.err;
    heap.emplace(a.err, a);
    heap.emplace(b.err, b);
  }
  out.value = total * scale;
  out.abserr = toterr * scale;
  return out;
}

}  // namespace freewalk
