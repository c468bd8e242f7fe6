#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace bdbm {

namespace {

double dist(const vec& a, const vec& b) {
  double r = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    r += d * d;
  }
  return std::sqrt(r);
}

double mean_cross_dist(const std::vector<vec>& X, const std::vector<vec>& Y) {
  double s = 0.0;
  for (const auto& x : X)
    for (const auto& y : Y) s += dist(x, y);
  return s / (double(X.size()) * double(Y.size()));
}

}  // namespace

double energy_distance(const std::vector<vec>& X, const std::vector<vec>& Y) {
  require(!X.empty() && !Y.empty(), "energy_distance: empty sample set");
  require(X[0].size() == Y[0].size(), "energy_distance: dimension mismatch");
  double xy = mean_cross_dist(X, Y);
  double xx = mean_cross_dist(X, X);
  double yy = mean_cross_dist(Y, Y);
  return 2.0 * xy - xx - yy;
}

double energy_distance_null_quantile(const std::vector<vec>& X, const std::vector<vec>& Y,
                                     int resamples, double quantile, Rng& rng) {
  require(resamples > 0, "energy_distance_null_quantile: resamples must be positive");
  require(quantile > 0.0 && quantile < 1.0, "energy_distance_null_quantile: quantile in (0,1)");
  std::vector<vec> pool;
  pool.reserve(X.size() + Y.size());
  pool.insert(pool.end(), X.begin(), X.end());
  pool.insert(pool.end(), Y.begin(), Y.end());
  const size_t nx = X.size();
  std::vector<double> stats(static_cast<size_t>(resamples));
  std::vector<size_t> idx(pool.size());
  for (int r = 0; r < resamples; ++r) {
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    // Fisher-Yates so the split is exchangeable under the null.
    for (size_t i = idx.size(); i > 1; --i) {
      size_t j = rng.below(i);
      std::swap(idx[i - 1], idx[j]);
    }
    std::vector<vec> A, B;
    A.reserve(nx);
    B.reserve(pool.size() - nx);
    for (size_t i = 0; i < pool.size(); ++i)
      (i < nx ? A : B).push_back(pool[idx[i]]);
    stats[size_t(r)] = energy_distance(A, B);
  }
  std::sort(stats.begin(), stats.end());
  size_t pos = size_t(quantile * double(stats.size()));
  if (pos >= stats.size()) pos = stats.size() - 1;
  return stats[pos];
}

double coupling_mse(const std::vector<vec>& generated, const std::vector<vec>& reference,
                    const std::vector<size_t>& pairing) {
  require(generated.size() == pairing.size(), "coupling_mse: pairing size mismatch");
  require(!generated.empty(), "coupling_mse: empty sample set");
  double s = 0.0;
  for (size_t i = 0; i < generated.size(); ++i) {
    require(pairing[i] < reference.size(), "coupling_mse: pairing index out of range");
    const vec& g = generated[i];
    const vec& r = reference[pairing[i]];
    require(g.size() == r.size(), "coupling_mse: dimension mismatch");
    for (size_t k = 0; k < g.size(); ++k) {
      double d = g[k] - r[k];
      s += d * d;
    }
  }
  return s / double(generated.size());
}

double coupling_mse(const std::vector<vec>& generated, const std::vector<vec>& reference) {
  require(generated.size() == reference.size(), "coupling_mse: size mismatch");
  std::vector<size_t> pairing(generated.size());
  for (size_t i = 0; i < pairing.size(); ++i) pairing[i] = i;
  return coupling_mse(generated, reference, pairing);
}

double diversity(const std::vector<std::vector<vec>>& per_source_sets) {
  require(!per_source_sets.empty(), "diversity: no sources");
  double total = 0.0;
  for (const auto& set : per_source_sets) {
    require(set.size() >= 2, "diversity: need at least two generations per source");
    const size_t d = set[0].size();
    double per_source = 0.0;
    for (size_t k = 0; k < d; ++k) {
      double mean = 0.0;
      for (const auto& x : set) mean += x[k];
      mean /= double(set.size());
      double var = 0.0;
      for (const auto& x : set) {
        double c = x[k] - mean;
        var += c * c;
      }
      var /= double(set.size() - 1);
      per_source += std::sqrt(var);
    }
    total += per_source / double(d);
  }
  return total / double(per_source_sets.size());
}

}  // namespace bdbm
