#include "freewalk/factor_measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>

#include "freewalk/errors.hpp"
#include "freewalk/util.hpp"

namespace freewalk {

namespace {

bool is_origin(const std::vector<int>& x) {
  return std::all_of(x.begin(), x.end(), [](int v) { return v == 0; });
}

std::vector<int> negate(const std::vector<int>& x) {
  std::vector<int> y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [](int v) { return -v; });
  return y;
}

// Smith normal form check: the nonzero support generates Z^d exactly when the
// d x m matrix of support vectors has elementary divisors all equal to 1.
bool generates_full_lattice(std::vector<std::vector<long long>> a, int d) {
  const size_t rows = a.size();
  if (rows == 0) return d == 0;
  const size_t cols = a[0].size();
  size_t r = 0, c = 0;
  int ones = 0;
  while (r < rows && c < cols) {
    // find a pivot with minimal nonzero absolute value
    size_t pr = rows, pc = cols;
    long long best = 0;
    for (size_t i = r; i < rows; ++i)
      for (size_t j = c; j < cols; ++j)
        if (a[i][j] != 0 && (best == 0 || std::llabs(a[i][j]) < best)) {
          best = std::llabs(a[i][j]);
          pr = i;
          pc = j;
        }
    if (pr == rows) break;  // all zero
    std::swap(a[r], a[pr]);
    for (size_t i = 0; i < rows; ++i) std::swap(a[i][c], a[i][pc]);
    bool clean = false;
    while (!clean) {
      clean = true;
      for (size_t i = r + 1; i < rows; ++i)
        if (a[i][c] != 0) {
          const long long q = a[i][c] / a[r][c];
          for (size_t j = c; j < cols; ++j) a[i][j] -= q * a[r][j];
          if (a[i][c] != 0) {
            std::swap(a[r], a[i]);
            clean = false;
          }
        }
      for (size_t j = c + 1; j < cols; ++j)
        if (a[r][j] != 0) {
          const long long q = a[r][j] / a[r][c];
          for (size_t i = r; i < rows; ++i) a[i][j] -= q * a[i][c];
          if (a[r][j] != 0) {
            for (size_t i = 0; i < rows; ++i) std::swap(a[i][c], a[i][j]);
            clean = false;
          }
        }
    }
    if (std::llabs(a[r][c]) == 1) ++ones;
    ++r;
    ++c;
  }
  // full rank d and every divisor equal to 1
  return static_cast<int>(r) == d && ones == d;
}

bool parity_periodic(const std::vector<Atom>& atoms, int d) {
  // Period 2 iff some index-2 subgroup {x : eps . x even} misses the whole
  // support. Only nonzero atoms matter; an origin atom forces aperiodicity.
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    bool all_odd = true;
    for (const Atom& a : atoms) {
      if (is_origin(a.x)) return false;
      int dot = 0;
      for (int j = 0; j < d; ++j)
        if (mask & (1u << j)) dot += a.x[static_cast<size_t>(j)];
      if ((dot & 1) == 0) {
        all_odd = false;
        break;
      }
    }
    if (all_odd) return true;
  }
  return false;
}

}  // namespace

FactorMeasure validate_factor(const RawMeasure& raw) {
  if (raw.dimension < 1) raise(errc::bad_config, "dimension must be >= 1");
  if (raw.atoms.empty()) raise(errc::bad_config, "empty support");
  const int d = raw.dimension;

  std::map<std::vector<int>, mpq_class> merged;
  for (const Atom& a : raw.atoms) {
    if (static_cast<int>(a.x.size()) != d)
      raise(errc::bad_config, "atom dimension mismatch in '" + raw.label + "'");
    if (a.w < 0) raise(errc::negative_weight, "atom with negative weight");
    if (a.w == 0) raise(errc::bad_config, "atom with zero weight");
    merged[a.x] += a.w;
  }

  mpq_class sum = 0;
  for (const auto& [x, w] : merged) sum += w;
  if (std::abs(sum.get_d() - 1.0) > 1e-12)
    raise(errc::weights_not_probability,
          "weights sum to " + std::to_string(sum.get_d()));

  for (const auto& [x, w] : merged) {
    auto it = merged.find(negate(x));
    if (it == merged.end() || std::abs(it->second.get_d() - w.get_d()) > 1e-15)
      raise(errc::not_symmetric, "missing or unequal weight at -x");
  }

  FactorMeasure m;
  m.dim = d;
  m.label = raw.label;
  std::vector<std::vector<long long>> support;
  for (const auto& [x, w] : merged) {
    Atom a;
    a.x = x;
    a.w = w;
    a.wd = w.get_d();
    if (is_origin(x)) {
      m.origin_weight = a.wd;
    } else {
      support.emplace_back(x.begin(), x.end());
    }
    m.atoms.push_back(std::move(a));
  }
  if (support.empty()) raise(errc::not_admissible, "support is only the origin");
  if (!generates_full_lattice(std::vector<std::vector<long long>>(
          support.begin(), support.end()), d)) {
    // transpose: we built rows = support vectors; SNF wants d x m but the
    // divisors of A and A^T coincide, so rows-as-vectors is fine.
    raise(errc::not_admissible, "support generates a proper sublattice");
  }

  m.aperiodic = !parity_periodic(m.atoms, d);

  m.axis_affine = true;
  m.axis_weights.assign(static_cast<size_t>(d), 0.0);
  for (const Atom& a : m.atoms) {
    if (is_origin(a.x)) continue;
    int nz = -1, cnt = 0;
    for (int j = 0; j < d; ++j)
      if (a.x[static_cast<size_t>(j)] != 0) {
        nz = j;
        ++cnt;
      }
    if (cnt != 1 || std::abs(a.x[static_cast<size_t>(nz)]) != 1) {
      m.axis_affine = false;
      break;
    }
    if (a.x[static_cast<size_t>(nz)] == 1) m.axis_weights[static_cast<size_t>(nz)] = a.wd;
  }
  if (!m.axis_affine) m.axis_weights.clear();
  return m;
}

double char_function(const FactorMeasure& m, std::span<const double> theta) {
  double s = 0.0;
  for (const Atom& a : m.atoms) {
    double dot = 0.0;
    for (int j = 0; j < m.dim; ++j)
      dot += theta[static_cast<size_t>(j)] * a.x[static_cast<size_t>(j)];
    s += a.wd * std::cos(dot);
  }
  return s;
}

std::vector<double> covariance(const FactorMeasure& m) {
  const int d = m.dim;
  std::vector<double> sig(static_cast<size_t>(d) * d, 0.0);
  for (const Atom& a : m.atoms)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        sig[static_cast<size_t>(i) * d + j] +=
            a.wd * a.x[static_cast<size_t>(i)] * a.x[static_cast<size_t>(j)];
  return sig;
}

std::uint64_t FactorMeasure::hash() const {
  std::string blob = std::to_string(dim) + "|" + label + "|";
  for (const Atom& a : atoms) {
    for (int v : a.x) blob += std::to_string(v) + ",";
    blob += a.w.get_str() + ";";
  }
  return fnv1a64(blob);
}

FactorMeasure lazy_srw(int d) {
  RawMeasure raw;
  raw.dimension = d;
  raw.label = "lazy-srw-z" + std::to_string(d);
  Atom origin;
  origin.x.assign(static_cast<size_t>(d), 0);
  origin.w = mpq_class(1, 2);
  raw.atoms.push_back(origin);
  for (int j = 0; j < d; ++j)
    for (int s : {1, -1}) {
      Atom a;
      a.x.assign(static_cast<size_t>(d), 0);
      a.x[static_cast<size_t>(j)] = s;
      a.w = mpq_class(1, 4 * d);
      raw.atoms.push_back(a);
    }
  return validate_factor(raw);
}

FactorMeasure srw(int d) {
  RawMeasure raw;
  raw.dimension = d;
  raw.label = "srw-z" + std::to_string(d);
  for (int j = 0; j < d; ++j)
    for (int s : {1, -1}) {
      Atom a;
      a.x.assign(static_cast<size_t>(d), 0);
      a.x[static_cast<size_t>(j)] = s;
      a.w = mpq_class(1, 2 * d);
      raw.atoms.push_back(a);
    }
  return validate_factor(raw);
}

}  // namespace freewalk
