#include "core/net.hpp"

#include <cmath>

namespace bdbm {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

const char* parameterization_name(Parameterization p) {
  switch (p) {
    case Parameterization::z_pred: return "z_pred";
    case Parameterization::endpoint_sum: return "endpoint_sum";
    case Parameterization::endpoint_pair: return "endpoint_pair";
  }
  return "?";
}

Parameterization parameterization_from_name(const std::string& s) {
  if (s == "z_pred") return Parameterization::z_pred;
  if (s == "endpoint_sum") return Parameterization::endpoint_sum;
  if (s == "endpoint_pair") return Parameterization::endpoint_pair;
  throw ConfigError(cat("unknown parameterization '", s, "'"));
}

size_t NetParams::n_params() const {
  size_t n = 0;
  for (const auto& l : layers) n += l.W.size() + l.b.size();
  return n;
}

NetParams make_net(uint32_t d, const std::vector<uint32_t>& hidden, uint32_t time_emb_dim,
                   Parameterization param, uint64_t seed) {
  if (d == 0) throw ConfigError("net: d must be positive");
  for (uint32_t h : hidden)
    if (h == 0) throw ConfigError("net: hidden widths must be positive");
  NetParams p;
  p.d = d;
  p.time_emb_dim = time_emb_dim;
  p.param = param;
  std::vector<uint32_t> dims;
  dims.push_back(static_cast<uint32_t>(p.input_dim()));
  for (uint32_t h : hidden) dims.push_back(h);
  dims.push_back(static_cast<uint32_t>(p.output_dim()));
  Rng rng(seed);
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    Layer l;
    l.cols = dims[i];
    l.rows = dims[i + 1];
    l.W.resize(size_t(l.rows) * l.cols);
    l.b.assign(l.rows, 0.0);
    double lim = std::sqrt(6.0 / (double(l.cols) + double(l.rows)));
    for (auto& w : l.W) w = rng.uniform(-lim, lim);
    p.layers.push_back(std::move(l));
  }
  return p;
}

vec embed_time(double t_norm, uint32_t time_emb_dim) {
  if (!(t_norm >= 0.0 && t_norm <= 1.0))
    throw DomainError(cat("embed_time: t_norm=", t_norm, " outside [0,1]"));
  vec e(1 + time_emb_dim);
  e[0] = t_norm;
  uint32_t n_sin = (time_emb_dim + 1) / 2;
  uint32_t n_cos = time_emb_dim / 2;
  for (uint32_t i = 0; i < n_sin; ++i) e[1 + i] = std::sin(kPi * std::ldexp(t_norm, i));
  for (uint32_t i = 0; i < n_cos; ++i) e[1 + n_sin + i] = std::cos(kPi * std::ldexp(t_norm, i));
  return e;
}

vec assemble_input(const NetParams& p, double t_norm, const vec& x_t, const vec& known_endpoint,
                   int m) {
  if (x_t.size() != p.d || known_endpoint.size() != p.d)
    throw DomainError(cat("net input: expected dimension ", p.d));
  if (m != 0 && m != 1) throw DomainError("net input: m must be 0 or 1");
  vec in(p.input_dim(), 0.0);
  size_t o = 0;
  for (size_t i = 0; i < p.d; ++i) in[o++] = x_t[i];
  for (size_t i = 0; i < p.d; ++i) in[o++] = (m == 0) ? known_endpoint[i] : 0.0;  // slot_A
  for (size_t i = 0; i < p.d; ++i) in[o++] = (m == 1) ? known_endpoint[i] : 0.0;  // slot_B
  vec e = embed_time(t_norm, p.time_emb_dim);
  for (double v : e) in[o++] = v;
  if (p.mask_channels) {
    in[o++] = double(m);
    in[o++] = double(1 - m);
  }
  return in;
}

Grads zero_grads(const NetParams& p) {
  Grads g;
  for (const auto& l : p.layers) {
    Layer z;
    z.rows = l.rows;
    z.cols = l.cols;
    z.W.assign(l.W.size(), 0.0);
    z.b.assign(l.b.size(), 0.0);
    g.layers.push_back(std::move(z));
  }
  return g;
}

void scale_grads(Grads& g, double a) {
  for (auto& l : g.layers) {
    for (auto& w : l.W) w *= a;
    for (auto& b : l.b) b *= a;
  }
}

void add_grads(Grads& dst, const Grads& src) {
  for (size_t i = 0; i < dst.layers.size(); ++i) {
    auto& d = dst.layers[i];
    const auto& s = src.layers[i];
    for (size_t j = 0; j < d.W.size(); ++j) d.W[j] += s.W[j];
    for (size_t j = 0; j < d.b.size(); ++j) d.b[j] += s.b[j];
  }
}

void net_forward(const NetParams& p, const vec& input, NetWorkspace& ws) {
  if (input.size() != p.input_dim())
    throw DomainError(cat("net forward: input dim ", input.size(), " != ", p.input_dim()));
  size_t L = p.layers.size();
  ws.acts.resize(L + 1);
  ws.deltas.resize(L);
  ws.acts[0] = input;
  for (size_t li = 0; li < L; ++li) {
    const Layer& l = p.layers[li];
    const vec& a = ws.acts[li];
    vec& out = ws.acts[li + 1];
    out.resize(l.rows);
    const bool last = (li + 1 == L);
    for (uint32_t r = 0; r < l.rows; ++r) {
      const double* w = l.W.data() + size_t(r) * l.cols;
      double s = l.b[r];
      for (uint32_t c = 0; c < l.cols; ++c) s += w[c] * a[c];
      out[r] = last ? s : std::tanh(s);
    }
  }
}

vec net_forward(const NetParams& p, const vec& input) {
  NetWorkspace ws;
  net_forward(p, input, ws);
  return ws.acts.back();
}

void net_backward(const NetParams& p, NetWorkspace& ws, const vec& grad_out, Grads& acc) {
  size_t L = p.layers.size();
  if (grad_out.size() != ws.acts[L].size())
    throw DomainError("net backward: grad_out dimension mismatch");
  ws.deltas.resize(L);
  ws.deltas[L - 1] = grad_out;  // output layer is linear
  for (size_t li = L; li-- > 0;) {
    const Layer& l = p.layers[li];
    const vec& a = ws.acts[li];           // layer input
    const vec& delta = ws.deltas[li];     // d(objective)/d(layer output activation)
    Layer& g = acc.layers[li];
    for (uint32_t r = 0; r < l.rows; ++r) {
      double dr = delta[r];
      g.b[r] += dr;
      double* gw = g.W.data() + size_t(r) * l.cols;
      for (uint32_t c = 0; c < l.cols; ++c) gw[c] += dr * a[c];
    }
    if (li == 0) break;
    // propagate to the previous layer and apply tanh' = 1 - a^2
    vec& prev = ws.deltas[li - 1];
    prev.assign(l.cols, 0.0);
    for (uint32_t r = 0; r < l.rows; ++r) {
      double dr = delta[r];
      const double* w = l.W.data() + size_t(r) * l.cols;
      for (uint32_t c = 0; c < l.cols; ++c) prev[c] += dr * w[c];
    }
    for (uint32_t c = 0; c < l.cols; ++c) prev[c] *= 1.0 - a[c] * a[c];
  }
}

vec net_predict(const NetParams& p, double t_norm, const vec& x_t, const vec& known_endpoint,
                int m) {
  return net_forward(p, assemble_input(p, t_norm, x_t, known_endpoint, m));
}

double grad_check(const NetParams& p, const vec& input, int probes, Rng& rng) {
  if (probes < 1) throw DomainError("grad_check: probes must be >= 1");
  vec g = rng.normal_vec(p.output_dim());
  NetWorkspace ws;
  net_forward(p, input, ws);
  Grads acc = zero_grads(p);
  net_backward(p, ws, g, acc);

  NetParams q = p;  // mutable copy for finite differences
  const double h = 1e-5;
  double worst = 0.0;
  auto objective = [&]() {
    vec out = net_forward(q, input);
    double s = 0.0;
    for (size_t i = 0; i < out.size(); ++i) s += out[i] * g[i];
    return s;
  };
  for (int k = 0; k < probes; ++k) {
    size_t li = rng.below(p.layers.size());
    const Layer& l = p.layers[li];
    size_t nw = l.W.size();
    size_t idx = rng.below(nw + l.b.size());
    bool is_w = idx < nw;
    double* slot = is_w ? &q.layers[li].W[idx] : &q.layers[li].b[idx - nw];
    double analytic = is_w ? acc.layers[li].W[idx] : acc.layers[li].b[idx - nw];
    double saved = *slot;
    *slot = saved + h;
    double fp = objective();
    *slot = saved - h;
    double fm = objective();
    *slot = saved;
    double fd = (fp - fm) / (2.0 * h);
    double rel = std::abs(analytic - fd) / std::max({std::abs(fd), std::abs(analytic), 1e-6});
    worst = std::max(worst, rel);
  }
  return worst;
}

AdamState make_adam(const NetParams& p, double lr) {
  AdamState st;
  st.lr = lr;
  Grads z = zero_grads(p);
  st.m = z.layers;
  st.v = z.layers;
  return st;
}

void adam_step(AdamState& st, NetParams& p, const Grads& g) {
  if (g.layers.size() != p.layers.size()) throw DomainError("adam: gradient shape mismatch");
  for (size_t li = 0; li < g.layers.size(); ++li) {
    for (double w : g.layers[li].W)
      if (!std::isfinite(w)) throw NumericError(cat("adam: non-finite gradient in layer ", li, " weights"));
    for (double b : g.layers[li].b)
      if (!std::isfinite(b)) throw NumericError(cat("adam: non-finite gradient in layer ", li, " biases"));
  }
  st.step += 1;
  double c1 = 1.0 - std::pow(st.beta1, double(st.step));
  double c2 = 1.0 - std::pow(st.beta2, double(st.step));
  for (size_t li = 0; li < p.layers.size(); ++li) {
    auto upd = [&](vec& theta, const vec& grad, vec& m, vec& v) {
      for (size_t i = 0; i < theta.size(); ++i) {
        m[i] = st.beta1 * m[i] + (1.0 - st.beta1) * grad[i];
        v[i] = st.beta2 * v[i] + (1.0 - st.beta2) * grad[i] * grad[i];
        double mhat = m[i] / c1;
        double vhat = v[i] / c2;
        theta[i] -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
      }
    };
    upd(p.layers[li].W, g.layers[li].W, st.m[li].W, st.v[li].W);
    upd(p.layers[li].b, g.layers[li].b, st.m[li].b, st.v[li].b);
  }
}

}  // namespace bdbm
