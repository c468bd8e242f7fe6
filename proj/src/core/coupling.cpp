#include "core/coupling.hpp"

#include <cmath>

namespace bdbm {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

vec sample_base2d(Base2D base, Rng& rng) {
  switch (base) {
    case Base2D::two_moons: {
      bool lower = rng.bernoulli(0.5);
      double th = rng.uniform(0.0, kPi);
      if (!lower) return {std::cos(th), std::sin(th)};
      return {1.0 - std::cos(th), 0.5 - std::sin(th)};
    }
    case Base2D::checkerboard: {
      // the 8 dark cells of a 4x4 board on [-2,2]^2
      uint64_t cell = rng.below(8);
      uint64_t i = cell / 2;                       // column 0..3
      uint64_t j = 2 * (cell % 2) + (i % 2);       // row with (i+j) even
      double u = rng.uniform();
      double v = rng.uniform();
      return {-2.0 + double(i) + u, -2.0 + double(j) + v};
    }
    case Base2D::ring: {
      double th = rng.uniform(0.0, 2.0 * kPi);
      return {std::cos(th), std::sin(th)};
    }
  }
  throw DomainError("unknown 2d base");
}
}  // namespace

Base2D base2d_from_name(const std::string& s) {
  if (s == "two_moons") return Base2D::two_moons;
  if (s == "checkerboard") return Base2D::checkerboard;
  if (s == "ring") return Base2D::ring;
  throw ConfigError(cat("unknown coupling base '", s, "'"));
}

Coupling Coupling::gaussian(vec mean, Mat cov) {
  if (mean.empty() || mean.size() % 2 != 0)
    throw ConfigError("gaussian coupling: mean must have 2d entries");
  if (cov.rows != mean.size() || cov.cols != mean.size())
    throw ConfigError("gaussian coupling: covariance must be 2d x 2d");
  for (size_t i = 0; i < cov.rows; ++i)
    for (size_t j = 0; j < i; ++j)
      if (std::abs(cov(i, j) - cov(j, i)) > 1e-12)
        throw ConfigError(cat("gaussian coupling: covariance not symmetric at (", i, ",", j, ")"));
  Coupling c;
  c.kind_ = CouplingKind::gaussian;
  c.d_ = mean.size() / 2;
  c.mean_ = std::move(mean);
  try {
    c.chol_ = cholesky(cov);
  } catch (const DomainError&) {
    throw ConfigError("gaussian coupling: covariance is not positive definite");
  }
  c.cov_ = std::move(cov);
  return c;
}

Coupling Coupling::mapped2d(Base2D base, AffineMap map, double noise_std) {
  if (map.A.rows != 2 || map.A.cols != 2 || map.b.size() != 2)
    throw ConfigError("mapped2d coupling: affine map must be 2x2 plus offset 2");
  if (noise_std < 0.0) throw ConfigError("mapped2d coupling: noise_std must be >= 0");
  Coupling c;
  c.kind_ = CouplingKind::mapped2d;
  c.d_ = 2;
  c.base_ = base;
  c.map_ = std::move(map);
  c.noise_std_ = noise_std;
  return c;
}

Coupling Coupling::csv_rows(std::vector<vec> rows, bool reshuffle) {
  if (rows.empty()) throw ConfigError("csv coupling: no rows");
  size_t w = rows.front().size();
  if (w == 0 || w % 2 != 0) throw ConfigError("csv coupling: rows must have 2d columns");
  for (const auto& r : rows) {
    if (r.size() != w) throw ConfigError("csv coupling: ragged rows");
    if (!all_finite(r)) throw ConfigError("csv coupling: non-finite entries");
  }
  Coupling c;
  c.kind_ = CouplingKind::csv;
  c.d_ = w / 2;
  c.rows_ = std::move(rows);
  c.reshuffle_ = reshuffle;
  return c;
}

EndpointPair Coupling::sample(Rng& rng) {
  EndpointPair pair;
  switch (kind_) {
    case CouplingKind::gaussian: {
      vec xi = rng.normal_vec(2 * d_);
      vec y = matvec(chol_, xi);
      pair.x0.assign(y.begin(), y.begin() + d_);
      pair.xT.assign(y.begin() + d_, y.end());
      for (size_t i = 0; i < d_; ++i) pair.x0[i] += mean_[i];
      for (size_t i = 0; i < d_; ++i) pair.xT[i] += mean_[d_ + i];
      return pair;
    }
    case CouplingKind::mapped2d: {
      pair.x0 = sample_base2d(base_, rng);
      pair.xT = matvec(map_.A, pair.x0);
      for (size_t i = 0; i < 2; ++i) pair.xT[i] += map_.b[i];
      if (noise_std_ > 0.0)
        for (size_t i = 0; i < 2; ++i) pair.xT[i] += noise_std_ * rng.normal();
      return pair;
    }
    case CouplingKind::csv: {
      if (cursor_ == rows_.size()) {
        if (!reshuffle_)
          throw DomainError(cat("csv coupling exhausted after ", rows_.size(),
                                " rows (reshuffle disabled)"));
        for (size_t i = rows_.size(); i > 1; --i)
          std::swap(rows_[i - 1], rows_[rng.below(i)]);
        cursor_ = 0;
      }
      const vec& r = rows_[cursor_++];
      pair.x0.assign(r.begin(), r.begin() + d_);
      pair.xT.assign(r.begin() + d_, r.end());
      return pair;
    }
  }
  throw DomainError("unknown coupling kind");
}

GaussianCouplingSpec Coupling::conditional() const {
  if (kind_ != CouplingKind::gaussian)
    throw DomainError("conditional(): only available for Gaussian couplings");
  size_t d = d_;
  // blocks of the joint covariance
  Mat saa(d, d), sab(d, d), sbb(d, d);
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) {
      saa(i, j) = cov_(i, j);
      sab(i, j) = cov_(i, d + j);
      sbb(i, j) = cov_(d + i, d + j);
    }
  Mat laa = cholesky(saa);
  // M = Sigma_BA Sigma_AA^-1  (row i of M solves Sigma_AA x = column i of Sigma_AB)
  Mat M(d, d);
  for (size_t i = 0; i < d; ++i) {
    vec col(d);
    for (size_t j = 0; j < d; ++j) col[j] = sab(j, i);
    vec x = chol_solve(laa, col);
    for (size_t j = 0; j < d; ++j) M(i, j) = x[j];
  }
  // conditional covariance Sigma_BB - M Sigma_AB
  Mat cond(d, d);
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) {
      double s = sbb(i, j);
      for (size_t k = 0; k < d; ++k) s -= M(i, k) * sab(k, j);
      cond(i, j) = s;
    }
  double v = 0.0;
  for (size_t i = 0; i < d; ++i) v += cond(i, i);
  v /= double(d);
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) {
      double want = (i == j) ? v : 0.0;
      if (std::abs(cond(i, j) - want) > 1e-9 * std::max(1.0, std::abs(v)))
        throw DomainError(cat("gaussian coupling: conditional covariance is not isotropic "
                              "(entry (", i, ",", j, ") = ", cond(i, j), ", v = ", v, ")"));
    }
  GaussianCouplingSpec spec;
  spec.M = M;
  spec.v_B = v;
  spec.c.resize(d);
  vec mA(mean_.begin(), mean_.begin() + d);
  vec Mm = matvec(M, mA);
  for (size_t i = 0; i < d; ++i) spec.c[i] = mean_[d + i] - Mm[i];
  return spec;
}

void Coupling::marginal_A(vec& mean, Mat& cov) const {
  if (kind_ != CouplingKind::gaussian)
    throw DomainError("marginal_A(): only available for Gaussian couplings");
  mean.assign(mean_.begin(), mean_.begin() + d_);
  cov = Mat(d_, d_);
  for (size_t i = 0; i < d_; ++i)
    for (size_t j = 0; j < d_; ++j) cov(i, j) = cov_(i, j);
}

}  // namespace bdbm
