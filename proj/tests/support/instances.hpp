#pragma once

// Random instances and independent oracles shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "canonlab/measure.hpp"

namespace testkit {

using canonlab::ExtensionPair;
using canonlab::LatticeElement;

inline ExtensionPair random_pair(std::mt19937_64& rng, std::size_t max_atoms, std::size_t cells, bool orth) {
  std::uniform_int_distribution<std::size_t> atoms(1, max_atoms);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  std::vector<double> weights(atoms(rng));
  for (double& x : weights) x = w(rng);
  return ExtensionPair(weights, cells, orth);
}

/// Values mix small integers (so ties occur) and continuous draws.
inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> mode(0, 2), small(-3, 3);
  std::normal_distribution<double> gauss(0.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = mode(rng) == 0 ? small(rng) : gauss(rng);
  return v;
}

inline LatticeElement random_element(std::mt19937_64& rng, const ExtensionPair& pair) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < pair.base_atoms(); ++i) rows.push_back(random_values(rng, pair.fiber_cells()));
  if (!pair.has_orthogonal()) return pair.from_rows(rows);
  return pair.from_rows(rows, random_values(rng, pair.fiber_cells()), random_values(rng, pair.fiber_cells()));
}

/// Scales every fiber so the mean of |v| over it is 1 (rows that vanish stay 0).
inline LatticeElement normalize_rows(const LatticeElement& f, const ExtensionPair& pair) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < pair.base_atoms(); ++i) {
    const auto r = pair.row(f, i);
    double m = 0.0;
    for (double v : r) m += std::abs(v);
    m /= static_cast<double>(r.size());
    rows.emplace_back(r.begin(), r.end());
    if (m > 0)
      for (double& v : rows.back()) v /= m;
  }
  if (!pair.has_orthogonal()) return pair.from_rows(rows);
  const auto p = pair.plus_fiber(f), q = pair.minus_fiber(f);
  return pair.from_rows(rows, {p.begin(), p.end()}, {q.begin(), q.end()});
}

/// Same per-fiber multisets and orthogonal norms: shuffle every fiber and
/// the {+}, {−} fibers among themselves.
inline LatticeElement shuffled(std::mt19937_64& rng, const LatticeElement& f, const ExtensionPair& pair) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < pair.base_atoms(); ++i) {
    const auto r = pair.row(f, i);
    rows.emplace_back(r.begin(), r.end());
    std::shuffle(rows.back().begin(), rows.back().end(), rng);
  }
  if (!pair.has_orthogonal()) return pair.from_rows(rows);
  const auto p = pair.plus_fiber(f), q = pair.minus_fiber(f);
  std::vector<double> pv(p.begin(), p.end()), qv(q.begin(), q.end());
  std::shuffle(pv.begin(), pv.end(), rng);
  std::shuffle(qv.begin(), qv.end(), rng);
  return pair.from_rows(rows, pv, qv);
}

/// ∫₀ᵗ of the quantile function of `row` (uniform cells): sort and prefix-sum.
inline double prefix_oracle(std::vector<double> row, double t) {
  std::sort(row.begin(), row.end());
  const double n = static_cast<double>(row.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double lo = static_cast<double>(j) / n, hi = static_cast<double>(j + 1) / n;
    if (t <= lo) break;
    acc += row[j] * (std::min(t, hi) - lo);
  }
  return acc;
}

}  // namespace testkit
