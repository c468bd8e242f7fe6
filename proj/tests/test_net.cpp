#include <cmath>
#include <limits>

#include "core/net.hpp"
#include "doctest.h"

using namespace bdbm;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

TEST_CASE("time embedding layout") {
  vec e0 = embed_time(0.3, 0);
  REQUIRE(e0.size() == 1);
  CHECK(e0[0] == 0.3);

  // even dim: sines at pi*2^i*t, then the same number of cosines
  vec e4 = embed_time(0.5, 4);
  REQUIRE(e4.size() == 5);
  CHECK(e4[0] == 0.5);
  CHECK(e4[1] == doctest::Approx(std::sin(kPi * 0.5)).epsilon(1e-15));
  CHECK(e4[2] == doctest::Approx(std::sin(kPi * 1.0)).epsilon(1e-15));
  CHECK(e4[3] == doctest::Approx(std::cos(kPi * 0.5)).epsilon(1e-15));
  CHECK(e4[4] == doctest::Approx(-1.0).epsilon(1e-15));

  // odd dim: the extra slot goes to the sines
  vec e3 = embed_time(0.25, 3);
  REQUIRE(e3.size() == 4);
  CHECK(e3[1] == doctest::Approx(std::sin(kPi * 0.25)));
  CHECK(e3[2] == doctest::Approx(std::sin(kPi * 0.5)));
  CHECK(e3[3] == doctest::Approx(std::cos(kPi * 0.25)));

  CHECK_THROWS_AS((void)embed_time(-0.1, 2), DomainError);
  CHECK_THROWS_AS((void)embed_time(1.1, 2), DomainError);
}

TEST_CASE("input assembly: slots, time features, mask channels") {
  NetParams p = make_net(2, {4}, 2, Parameterization::z_pred, 1);
  REQUIRE(p.input_dim() == 3 * 2 + (2 + 1) + 2);

  vec x_t{1.0, 2.0};
  vec known{3.0, 4.0};

  vec in0 = assemble_input(p, 0.5, x_t, known, 0);
  REQUIRE(in0.size() == p.input_dim());
  CHECK(in0[0] == 1.0);
  CHECK(in0[1] == 2.0);
  CHECK(in0[2] == 3.0);  // slot A carries the known endpoint when m=0
  CHECK(in0[3] == 4.0);
  CHECK(in0[4] == 0.0);  // slot B empty
  CHECK(in0[5] == 0.0);
  CHECK(in0[6] == 0.5);  // raw time scalar
  CHECK(in0[9] == 0.0);  // m
  CHECK(in0[10] == 1.0); // 1-m

  vec in1 = assemble_input(p, 0.5, x_t, known, 1);
  CHECK(in1[2] == 0.0);
  CHECK(in1[3] == 0.0);
  CHECK(in1[4] == 3.0);  // slot B carries it when m=1
  CHECK(in1[5] == 4.0);
  CHECK(in1[9] == 1.0);
  CHECK(in1[10] == 0.0);

  CHECK_THROWS_AS((void)assemble_input(p, 0.5, x_t, known, 2), DomainError);
  CHECK_THROWS_AS((void)assemble_input(p, 0.5, vec{1.0}, known, 0), DomainError);
}

TEST_CASE("glorot init: shapes, bounds, determinism") {
  NetParams p = make_net(2, {8, 8}, 4, Parameterization::endpoint_pair, 7);
  REQUIRE(p.layers.size() == 3);
  CHECK(p.layers[0].cols == p.input_dim());
  CHECK(p.layers[0].rows == 8);
  CHECK(p.layers[1].rows == 8);
  CHECK(p.layers[2].rows == p.output_dim());
  CHECK(p.output_dim() == 4);  // endpoint_pair emits both endpoints

  for (const auto& l : p.layers) {
    double lim = std::sqrt(6.0 / (double(l.rows) + double(l.cols)));
    for (double w : l.W) CHECK(std::abs(w) <= lim);
    for (double b : l.b) CHECK(b == 0.0);
  }

  NetParams q = make_net(2, {8, 8}, 4, Parameterization::endpoint_pair, 7);
  CHECK(q.layers[0].W == p.layers[0].W);
  NetParams r = make_net(2, {8, 8}, 4, Parameterization::endpoint_pair, 8);
  CHECK(r.layers[0].W != p.layers[0].W);

  CHECK_THROWS_AS((void)make_net(0, {8}, 4, Parameterization::z_pred, 1), ConfigError);
  CHECK_THROWS_AS((void)make_net(2, {8, 0}, 4, Parameterization::z_pred, 1), ConfigError);

  CHECK(p.n_params() ==
        (8 * p.input_dim() + 8) + (8 * 8 + 8) + (4 * 8 + 4));
}

TEST_CASE("forward pass against hand computation") {
  // no hidden layer: pure affine map
  NetParams lin = make_net(1, {}, 0, Parameterization::z_pred, 3);
  REQUIRE(lin.layers.size() == 1);
  REQUIRE(lin.input_dim() == 6);
  Layer& l = lin.layers[0];
  l.W = {0.5, -1.0, 2.0, 0.25, 3.0, -0.5};
  l.b = {0.125};
  // in = [x_t, slotA, slotB, t, m, 1-m] = [0.3, 0.7, 0, 0.5, 0, 1]
  vec out = net_predict(lin, 0.5, {0.3}, {0.7}, 0);
  double want = 0.5 * 0.3 - 1.0 * 0.7 + 0.25 * 0.5 - 0.5 * 1.0 + 0.125;
  CHECK(out[0] == doctest::Approx(want).epsilon(1e-15));

  // one tanh hidden unit
  NetParams mlp = make_net(1, {1}, 0, Parameterization::z_pred, 3);
  mlp.layers[0].W = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  mlp.layers[0].b = {0.05};
  mlp.layers[1].W = {2.0};
  mlp.layers[1].b = {-1.0};
  vec out2 = net_predict(mlp, 0.5, {0.3}, {0.7}, 0);
  double pre = 0.1 * 0.3 + 0.2 * 0.7 + 0.4 * 0.5 + 0.6 * 1.0 + 0.05;
  CHECK(out2[0] == doctest::Approx(2.0 * std::tanh(pre) - 1.0).epsilon(1e-15));

  CHECK_THROWS_AS((void)net_forward(mlp, vec(5, 0.0)), DomainError);
}

TEST_CASE("backward pass matches finite differences") {
  Rng rng(41);
  for (Parameterization param : {Parameterization::z_pred, Parameterization::endpoint_pair}) {
    NetParams p = make_net(2, {16, 16}, 4, param, 11);
    vec x_t = rng.normal_vec(2);
    vec known = rng.normal_vec(2);
    vec in = assemble_input(p, 0.37, x_t, known, 1);
    CHECK(grad_check(p, in, 200, rng) < 1e-4);
  }
}

TEST_CASE("backward accumulates into the gradient buffer") {
  NetParams p = make_net(1, {4}, 2, Parameterization::z_pred, 5);
  vec in = assemble_input(p, 0.2, {0.4}, {-0.3}, 0);
  NetWorkspace ws;
  net_forward(p, in, ws);
  vec go{1.0};
  Grads once = zero_grads(p);
  net_backward(p, ws, go, once);
  Grads twice = zero_grads(p);
  net_backward(p, ws, go, twice);
  net_backward(p, ws, go, twice);
  for (size_t li = 0; li < once.layers.size(); ++li)
    for (size_t i = 0; i < once.layers[li].W.size(); ++i)
      CHECK(twice.layers[li].W[i] == doctest::Approx(2.0 * once.layers[li].W[i]).epsilon(1e-15));
}

TEST_CASE("adam: hand-checked first step, untouched zero-grad slots") {
  NetParams p = make_net(1, {}, 0, Parameterization::z_pred, 2);
  for (auto& w : p.layers[0].W) w = 0.0;
  AdamState st = make_adam(p);
  REQUIRE(st.lr == 1e-4);
  Grads g = zero_grads(p);
  g.layers[0].W[0] = 0.5;

  adam_step(st, p, g);
  CHECK(st.step == 1);
  // bias-corrected m-hat/v-hat give theta -= lr * 0.5/(0.5 + eps)
  CHECK(std::abs(p.layers[0].W[0] + 1e-4) < 1e-10);
  for (size_t i = 1; i < p.layers[0].W.size(); ++i) CHECK(p.layers[0].W[i] == 0.0);
  CHECK(p.layers[0].b[0] == 0.0);

  g.layers[0].W[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(adam_step(st, p, g), doctest::Contains("layer"), NumericError);
}

TEST_CASE("parameterization names round trip") {
  for (auto param : {Parameterization::z_pred, Parameterization::endpoint_sum,
                     Parameterization::endpoint_pair})
    CHECK(parameterization_from_name(parameterization_name(param)) == param);
  CHECK_THROWS_AS((void)parameterization_from_name("zpred"), ConfigError);
}
