#pragma once

#include "core/kernels.hpp"

namespace bdbm {

enum class CouplingKind { gaussian, mapped2d, csv };
enum class Base2D { two_moons, checkerboard, ring };

Base2D base2d_from_name(const std::string& s);

struct AffineMap {
  Mat A;  // d x d
  vec b;  // d
};

// Source of coupled endpoint pairs (x0, xT) ~ p(y_A, y_B).
class Coupling {
 public:
  // Joint Gaussian over the stacked vector (y_A, y_B): mean 2d, cov 2d x 2d SPD.
  static Coupling gaussian(vec mean, Mat cov);
  // y_A ~ base distribution; y_B = A y_A + b + noise_std * eps.
  static Coupling mapped2d(Base2D base, AffineMap map, double noise_std);
  // Fixed table of rows (x0 ‖ xT); optionally reshuffled on exhaustion.
  static Coupling csv_rows(std::vector<vec> rows, bool reshuffle);

  CouplingKind kind() const { return kind_; }
  size_t d() const { return d_; }

  EndpointPair sample(Rng& rng);

  // Conditional form y_B | y_A (Gaussian couplings only; the conditional
  // covariance must be isotropic for the analytic score oracle).
  GaussianCouplingSpec conditional() const;
  // Marginal of y_A (Gaussian couplings only).
  void marginal_A(vec& mean, Mat& cov) const;

 private:
  Coupling() = default;
  CouplingKind kind_ = CouplingKind::gaussian;
  size_t d_ = 0;

  vec mean_;      // gaussian
  Mat cov_;       // gaussian
  Mat chol_;      // gaussian

  Base2D base_ = Base2D::two_moons;  // mapped2d
  AffineMap map_;                    // mapped2d
  double noise_std_ = 0.0;           // mapped2d

  std::vector<vec> rows_;  // csv
  size_t cursor_ = 0;      // csv
  bool reshuffle_ = false; // csv
};

inline EndpointPair sample_pair(Coupling& c, Rng& rng) { return c.sample(rng); }

}  // namespace bdbm
