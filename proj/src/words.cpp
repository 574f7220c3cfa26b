#include "freewalk/words.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <thread>

#include "freewalk/errors.hpp"

namespace freewalk {

namespace {

struct StepAtom {
  int factor = 0;  // 0 = identity step
  std::vector<int> dx;
  double w = 0.0;
};

std::vector<StepAtom> step_atoms(const FreeProductConfig& cfg) {
  std::vector<StepAtom> atoms;
  StepAtom id;
  id.w = cfg.alpha * cfg.factor1.origin_weight +
         (1.0 - cfg.alpha) * cfg.factor2.origin_weight;
  if (id.w > 0.0) atoms.push_back(id);
  const FactorMeasure* ms[2] = {&cfg.factor1, &cfg.factor2};
  const double as[2] = {cfg.alpha, 1.0 - cfg.alpha};
  for (int i = 0; i < 2; ++i)
    for (const Atom& a : ms[i]->atoms) {
      if (std::all_of(a.x.begin(), a.x.end(), [](int v) { return v == 0; }))
        continue;
      StepAtom s;
      s.factor = i + 1;
      s.dx = a.x;
      s.w = as[i] * a.wd;
      atoms.push_back(s);
    }
  return atoms;
}

}  // namespace

void GroupWord::step(int factor, const std::vector<int>& dx) {
  if (!letters.empty() && letters.back().factor == factor) {
    Letter& last = letters.back();
    bool zero = true;
    for (size_t j = 0; j < dx.size(); ++j) {
      last.x[j] += dx[j];
      if (last.x[j] != 0) zero = false;
    }
    if (zero) letters.pop_back();
    return;
  }
  Letter l;
  l.factor = factor;
  l.x = dx;
  letters.push_back(std::move(l));
}

std::size_t WordKeyHash::operator()(const WordKey& k) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::int8_t b : k.data) {
    h ^= static_cast<std::uint8_t>(b);
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h);
}

namespace {

// Key layout: [len][factor x0 .. x_{d-1}] per letter.
void append_letter(WordKey& key, int& pos, int factor, const int* x, int d) {
  key.data[static_cast<size_t>(pos++)] = static_cast<std::int8_t>(factor);
  for (int j = 0; j < d; ++j) key.data[static_cast<size_t>(pos++)] = static_cast<std::int8_t>(x[j]);
}

struct KeyCodec {
  int d1, d2;

  int dim(int factor) const { return factor == 1 ? d1 : d2; }

  // Applies one step to an encoded word. Returns false if a coordinate would
  // overflow the int8 layout (cannot happen under the n <= 12 guard).
  bool apply(const WordKey& in, WordKey& out, int factor, const std::vector<int>& dx) const {
    const int len = in.data[0];
    const int d = dim(factor);
    // locate the last letter
    int pos = 1;
    int last_pos = -1, last_factor = 0, last_d = 0;
    for (int l = 0; l < len; ++l) {
      last_pos = pos;
      last_factor = in.data[static_cast<size_t>(pos)];
      last_d = dim(last_factor);
      pos += 1 + last_d;
    }
    out = in;
    if (len > 0 && last_factor == factor) {
      bool zero = true;
      for (int j = 0; j < d; ++j) {
        const int v = out.data[static_cast<size_t>(last_pos + 1 + j)] + dx[static_cast<size_t>(j)];
        if (v < -127 || v > 127) return false;
        out.data[static_cast<size_t>(last_pos + 1 + j)] = static_cast<std::int8_t>(v);
        if (v != 0) zero = false;
      }
      if (zero) {
        // drop the letter
        for (int b = last_pos; b < WordKey::kBytes; ++b) out.data[static_cast<size_t>(b)] = 0;
        out.data[0] = static_cast<std::int8_t>(len - 1);
      }
      return true;
    }
    if (pos + 1 + d > WordKey::kBytes) return false;
    int p = pos;
    std::array<int, 8> tmp{};
    for (int j = 0; j < d; ++j) tmp[static_cast<size_t>(j)] = dx[static_cast<size_t>(j)];
    append_letter(out, p, factor, tmp.data(), d);
    out.data[0] = static_cast<std::int8_t>(len + 1);
    return true;
  }
};

}  // namespace

std::vector<WordDistribution> bfs_distributions(const FreeProductConfig& cfg,
                                                int n_half, const BfsOptions& opt) {
  if (n_half < 0) raise(errc::domain_error, "negative step count");
  const auto atoms = step_atoms(cfg);
  const KeyCodec codec{cfg.factor1.dim, cfg.factor2.dim};
  std::vector<WordDistribution> out;
  WordDistribution cur;
  WordKey identity{};
  cur.emplace(identity, 1.0);
  out.push_back(cur);
  for (int n = 1; n <= n_half; ++n) {
    WordDistribution next;
    next.reserve(cur.size() * 12);
    for (const auto& [key, p] : cur) {
      for (const StepAtom& a : atoms) {
        if (a.factor == 0) {
          next[key] += a.w * p;
          continue;
        }
        WordKey stepped;
        if (!codec.apply(key, stepped, a.factor, a.dx))
          raise(errc::budget_exceeded, "word coordinates overflow the packed key");
        next[stepped] += a.w * p;
      }
      if (next.size() > opt.state_budget)
        raise(errc::budget_exceeded,
              "word distribution exceeds " + std::to_string(opt.state_budget) +
                  " states at step " + std::to_string(n));
    }
    out.push_back(next);
    cur = std::move(next);
  }
  return out;
}

namespace {

double dot(const WordDistribution& a, const WordDistribution& b) {
  const WordDistribution& small = a.size() <= b.size() ? a : b;
  const WordDistribution& large = a.size() <= b.size() ? b : a;
  double acc = 0.0, comp = 0.0;
  for (const auto& [key, p] : small) {
    const auto it = large.find(key);
    if (it == large.end()) continue;
    const double term = p * it->second;
    const double y = term - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return acc;
}

}  // namespace

CoefficientSeries bfs_oracle(const FreeProductConfig& cfg, int n_max,
                             const BfsOptions& opt) {
  if (n_max < 0) raise(errc::domain_error, "negative n_max");
  if (n_max > 12)
    raise(errc::budget_exceeded, "bfs oracle capped at n_max = 12");
  const auto atoms = step_atoms(cfg);
  const KeyCodec codec{cfg.factor1.dim, cfg.factor2.dim};
  CoefficientSeries s;
  s.c.assign(static_cast<size_t>(n_max) + 1, 0.0);
  s.c[0] = 1.0;

  // stream consecutive distribution pairs; only two levels live at a time
  WordDistribution cur;
  cur.emplace(WordKey{}, 1.0);
  const int half = (n_max + 1) / 2;
  for (int m = 0; m < half; ++m) {
    WordDistribution next;
    next.reserve(cur.size() * 12);
    for (const auto& [key, p] : cur) {
      for (const StepAtom& a : atoms) {
        if (a.factor == 0) {
          next[key] += a.w * p;
          continue;
        }
        WordKey stepped;
        if (!codec.apply(key, stepped, a.factor, a.dx))
          raise(errc::budget_exceeded, "word coordinates overflow the packed key");
        next[stepped] += a.w * p;
      }
      if (next.size() > opt.state_budget)
        raise(errc::budget_exceeded,
              "word distribution exceeds " + std::to_string(opt.state_budget) +
                  " states at step " + std::to_string(m + 1));
    }
    // mu^{*(m + m + 1)}(e) and mu^{*(2m + 2)}(e) via symmetry
    if (2 * m + 1 <= n_max) s.c[static_cast<size_t>(2 * m + 1)] = dot(cur, next);
    if (2 * m + 2 <= n_max) s.c[static_cast<size_t>(2 * m + 2)] = dot(next, next);
    cur = std::move(next);
  }
  return s;
}

std::vector<std::pair<std::vector<int>, double>> bfs_factor_green(
    const FreeProductConfig& cfg, int factor, double r, int n_half,
    const BfsOptions& opt) {
  const auto dists = bfs_distributions(cfg, n_half, opt);
  const int d = factor == 1 ? cfg.factor1.dim : cfg.factor2.dim;
  std::unordered_map<WordKey, double, WordKeyHash> green;
  double rn = 1.0;
  for (int n = 0; n <= n_half; ++n) {
    for (const auto& [key, p] : dists[static_cast<size_t>(n)]) {
      const int len = key.data[0];
      if (len > 1) continue;
      if (len == 1 && key.data[1] != factor) continue;
      green[key] += p * rn;
    }
    rn *= r;
  }
  std::vector<std::pair<std::vector<int>, double>> out;
  for (const auto& [key, v] : green) {
    std::vector<int> x(static_cast<size_t>(d), 0);
    if (key.data[0] == 1)
      for (int j = 0; j < d; ++j) x[static_cast<size_t>(j)] = key.data[static_cast<size_t>(2 + j)];
    out.emplace_back(std::move(x), v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct McWalk {
  int factor = 0;
  std::array<std::int16_t, 8> x{};
};

}  // namespace

McReport monte_carlo(const FreeProductConfig& cfg, int n, long long trials,
                     std::uint64_t seed, int threads) {
  if (trials < 1) raise(errc::domain_error, "trials must be >= 1");
  const auto atoms = step_atoms(cfg);
  std::vector<double> cdf(atoms.size());
  double acc = 0.0;
  for (size_t i = 0; i < atoms.size(); ++i) {
    acc += atoms[i].w;
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  constexpr int kShards = 64;
  std::array<long long, kShards> hits{};
  const auto run_shard = [&](int shard) {
    const long long lo = trials * shard / kShards;
    const long long hi = trials * (shard + 1) / kShards;
    long long h = 0;
    std::vector<McWalk> word;
    word.reserve(static_cast<size_t>(n));
    for (long long trial = lo; trial < hi; ++trial) {
      std::uint64_t state = seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(trial + 1));
      word.clear();
      for (int step = 0; step < n; ++step) {
        const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
        const size_t pick = static_cast<size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        const StepAtom& a = atoms[pick];
        if (a.factor == 0) continue;
        if (!word.empty() && word.back().factor == a.factor) {
          bool zero = true;
          for (size_t j = 0; j < a.dx.size(); ++j) {
            word.back().x[j] = static_cast<std::int16_t>(word.back().x[j] + a.dx[j]);
            if (word.back().x[j] != 0) zero = false;
          }
          if (zero) word.pop_back();
        } else {
          McWalk l;
          l.factor = a.factor;
          for (size_t j = 0; j < a.dx.size(); ++j) l.x[j] = static_cast<std::int16_t>(a.dx[j]);
          word.push_back(l);
        }
      }
      if (word.empty()) ++h;
    }
    hits[static_cast<size_t>(shard)] = h;
  };

  const int workers = std::max(1, std::min(threads, kShards));
  if (workers == 1) {
    for (int s = 0; s < kShards; ++s) run_shard(s);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> cursor{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        int s;
        while ((s = cursor.fetch_add(1)) < kShards) run_shard(s);
      });
    for (auto& t : pool) t.join();
  }

  long long total = 0;
  for (long long h : hits) total += h;  // fixed shard order
  McReport rep;
  rep.n = n;
  rep.trials = trials;
  rep.seed = seed;
  rep.estimate = static_cast<double>(total) / static_cast<double>(trials);
  rep.stderr_est = std::sqrt(std::max(0.0, rep.estimate * (1.0 - rep.estimate) /
                                               static_cast<double>(trials)));
  return rep;
}

}  // namespace freewalk
