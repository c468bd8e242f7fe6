#include <cmath>

#include "core/metrics.hpp"
#include "doctest.h"

using namespace bdbm;

TEST_CASE("energy distance: exact small cases") {
  std::vector<vec> X{{0.0}, {2.0}};
  CHECK(energy_distance(X, X) == 0.0);  // identical multisets cancel exactly

  std::vector<vec> A{{0.0}};
  std::vector<vec> B{{3.0}};
  CHECK(energy_distance(A, B) == doctest::Approx(6.0).epsilon(1e-15));  // 2||a-b||

  std::vector<vec> Y{{1.0}, {3.0}};
  // 2*mean(1,3,1,1) - mean(0,2,2,0) - mean(0,2,2,0) = 3 - 1 - 1
  CHECK(energy_distance(X, Y) == doctest::Approx(1.0).epsilon(1e-15));

  std::vector<vec> X2{{0.0, 0.0}};
  std::vector<vec> Y2{{3.0, 4.0}};
  CHECK(energy_distance(X2, Y2) == doctest::Approx(10.0).epsilon(1e-15));  // 2 * 5

  CHECK_THROWS_AS((void)energy_distance({}, Y), DomainError);
  CHECK_THROWS_AS((void)energy_distance(X, {{1.0, 2.0}}), DomainError);  // dim mismatch
}

TEST_CASE("energy distance separates shifted samples and is near zero for equal law") {
  Rng rng(2024);
  std::vector<vec> X, Y, Z;
  for (int i = 0; i < 300; ++i) {
    X.push_back(rng.normal_vec(2));
    Y.push_back(rng.normal_vec(2));
    vec w = rng.normal_vec(2);
    w[0] += 3.0;
    Z.push_back(w);
  }
  double same = energy_distance(X, Y);
  double shifted = energy_distance(X, Z);
  CHECK(shifted > 10.0 * same);
  CHECK(shifted > 1.0);
}

TEST_CASE("permutation null quantile calibrates the same-law case") {
  Rng rng(7);
  std::vector<vec> X, Y;
  for (int i = 0; i < 120; ++i) {
    X.push_back(rng.normal_vec(2));
    Y.push_back(rng.normal_vec(2));
  }
  Rng qrng(8);
  double q95 = energy_distance_null_quantile(X, Y, 200, 0.95, qrng);
  CHECK(q95 > 0.0);
  CHECK(energy_distance(X, Y) < q95);  // same distribution stays under the null band

  Rng qrng2(8);
  double q50 = energy_distance_null_quantile(X, Y, 200, 0.5, qrng2);
  CHECK(q50 <= q95);

  // a strong shift clears the same band
  std::vector<vec> Z = Y;
  for (auto& z : Z) z[0] += 3.0;
  CHECK(energy_distance(X, Z) > q95);

  Rng qrng3(9);
  CHECK_THROWS_AS(
      (void)energy_distance_null_quantile(X, Y, 0, 0.95, qrng3), DomainError);
  CHECK_THROWS_AS(
      (void)energy_distance_null_quantile(X, Y, 100, 1.5, qrng3), DomainError);
}

TEST_CASE("null quantile is deterministic in the rng seed") {
  Rng rng(3);
  std::vector<vec> X, Y;
  for (int i = 0; i < 40; ++i) {
    X.push_back(rng.normal_vec(1));
    Y.push_back(rng.normal_vec(1));
  }
  Rng a(11), b(11), c(12);
  double qa = energy_distance_null_quantile(X, Y, 50, 0.9, a);
  double qb = energy_distance_null_quantile(X, Y, 50, 0.9, b);
  double qc = energy_distance_null_quantile(X, Y, 50, 0.9, c);
  CHECK(qa == qb);
  CHECK(qa != qc);
}

TEST_CASE("coupling mse: exact values and pairing sensitivity") {
  std::vector<vec> G{{1.0, 1.0}, {2.0, 0.0}};
  CHECK(coupling_mse(G, G) == 0.0);

  std::vector<vec> R{{0.0, 0.0}, {1.0, -1.0}};
  // both rows offset by (1,1): mse = ||(1,1)||^2 = 2
  CHECK(coupling_mse(G, R) == doctest::Approx(2.0).epsilon(1e-15));

  // swapping the pairing changes the number
  std::vector<size_t> swapped{1, 0};
  double cross = coupling_mse(G, R, swapped);
  CHECK(cross != doctest::Approx(2.0));
  // explicit identity pairing agrees with the implicit overload
  std::vector<size_t> ident{0, 1};
  CHECK(coupling_mse(G, R, ident) == coupling_mse(G, R));

  CHECK_THROWS_AS((void)coupling_mse(G, {{1.0, 1.0}}), DomainError);          // size mismatch
  CHECK_THROWS_AS((void)coupling_mse(G, R, std::vector<size_t>{0, 7}), DomainError);  // oob
  CHECK_THROWS_AS((void)coupling_mse({}, {}), DomainError);
}

TEST_CASE("diversity: exact and statistical behaviour") {
  // one source, generations {0, 2}: sample std with n-1 is sqrt(2)
  std::vector<std::vector<vec>> sets{{{0.0}, {2.0}}};
  CHECK(diversity(sets) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  // identical generations have zero diversity
  std::vector<std::vector<vec>> flat{{{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}}};
  CHECK(diversity(flat) == 0.0);

  // iid N(0, 4): diversity estimates sigma = 2
  Rng rng(5);
  std::vector<std::vector<vec>> mc;
  for (int s = 0; s < 20; ++s) {
    std::vector<vec> gen;
    for (int g = 0; g < 200; ++g) {
      vec v = rng.normal_vec(2);
      for (auto& x : v) x *= 2.0;
      gen.push_back(v);
    }
    mc.push_back(gen);
  }
  CHECK(diversity(mc) == doctest::Approx(2.0).epsilon(0.05));

  CHECK_THROWS_AS((void)diversity({}), DomainError);
  CHECK_THROWS_AS((void)diversity({{{1.0}}}), DomainError);  // needs >= 2 generations
}
