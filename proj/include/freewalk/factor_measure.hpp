#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace freewalk {

// One atom of a finitely supported measure on Z^d.
struct Atom {
  std::vector<int> x;
  mpq_class w;       // exact weight
  double wd = 0.0;   // double mirror of w
};

struct RawMeasure {
  int dimension = 0;
  std::vector<Atom> atoms;
  std::string label;
};

// A validated, finitely supported, symmetric, admissible probability measure
// on Z^d. Immutable after construction via validate_factor().
struct FactorMeasure {
  int dim = 0;
  std::vector<Atom> atoms;  // sorted lexicographically by point
  std::string label;
  double origin_weight = 0.0;
  bool aperiodic = false;
  // Support contained in {0, +-e_j}: the characteristic function is affine in
  // the coordinate cosines, which unlocks the 1-D Bessel reduction.
  bool axis_affine = false;
  double radius_conv = 1.0;  // R_i; equal to 1 for symmetric admissible walks

  // axis weights b_j = mu(e_j) when axis_affine
  std::vector<double> axis_weights;

  std::uint64_t hash() const;
};

// Checks positivity, normalization, symmetry, admissibility (Smith normal
// form of the support lattice) and records the aperiodicity flag.
// Throws Error with the specific rejection code.
FactorMeasure validate_factor(const RawMeasure& raw);

// phi(theta) = sum_x mu(x) cos(theta . x)
double char_function(const FactorMeasure& m, std::span<const double> theta);

// Covariance matrix Sigma_{jk} = sum_x mu(x) x_j x_k, row-major d x d.
std::vector<double> covariance(const FactorMeasure& m);

// Shipped presets. Lazy simple random walk: mu(0) = 1/2, mu(+-e_j) = 1/(4d).
FactorMeasure lazy_srw(int d);
// Plain simple random walk: mu(+-e_j) = 1/(2d). Periodic (period 2).
FactorMeasure srw(int d);

}  // namespace freewalk
