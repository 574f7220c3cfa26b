#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "freewalk/conv_series.hpp"
#include "freewalk/freeprod.hpp"

namespace freewalk {

// Normal form of a free-product element: alternating letters
// (factor index, nonzero lattice point). Empty word = identity.
struct GroupWord {
  struct Letter {
    int factor = 0;                // 1 or 2
    std::vector<int> x;            // nonzero point of Z^{d_factor}
  };
  std::vector<Letter> letters;

  bool is_identity() const { return letters.empty(); }
  // Right-multiply by a step in the given factor; merges with the last
  // letter when the factors coincide, dropping it if the sum is the origin.
  void step(int factor, const std::vector<int>& dx);
};

// Packed fixed-size word key for dense distribution maps.
struct WordKey {
  static constexpr int kBytes = 48;
  std::array<std::int8_t, kBytes> data{};
  bool operator==(const WordKey&) const = default;
};

struct WordKeyHash {
  std::size_t operator()(const WordKey& k) const noexcept;
};

using WordDistribution = std::unordered_map<WordKey, double, WordKeyHash>;

struct BfsOptions {
  std::size_t state_budget = 60'000'000;  // max states in one distribution
};

// Exact n-step distributions over normal forms, n = 0..n_half. Letters are
// capped at |coordinate| <= 127 which the n <= 12 guard keeps far away.
std::vector<WordDistribution> bfs_distributions(const FreeProductConfig& cfg,
                                                int n_half,
                                                const BfsOptions& opt = {});

// Exact mu_alpha^{*n}(e) for n <= n_max (n_max <= 12). Uses the symmetry
// mu^{*(m+k)}(e) = sum_w mu^{*m}(w) mu^{*k}(w), so only distributions up to
// ceil(n_max / 2) steps are materialized.
CoefficientSeries bfs_oracle(const FreeProductConfig& cfg, int n_max,
                             const BfsOptions& opt = {});

// G(e, x | r) restricted to single-letter words of one factor, as an exact
// truncated series sum_{n <= n_half} mu^{*n}(x) r^n. Returns pairs of
// (point, value) including the identity. Test oracle for the factor-restricted
// moment sums.
std::vector<std::pair<std::vector<int>, double>> bfs_factor_green(
    const FreeProductConfig& cfg, int factor, double r, int n_half,
    const BfsOptions& opt = {});

struct McReport {
  int n = 0;
  long long trials = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double stderr_est = 0.0;
};

// Counter-based reproducible Monte Carlo estimate of mu^{*n}(e). The shard
// structure is fixed, so the result is bit-identical for any thread count.
McReport monte_carlo(const FreeProductConfig& cfg, int n, long long trials,
                     std::uint64_t seed, int threads = 1);

}  // namespace freewalk
