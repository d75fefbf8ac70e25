#include "adex/nn/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "adex/error.hpp"
#include "adex/kernels.hpp"

namespace adex::nn {
namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Gate nonlinearities and the state update for one sequence; gates holds the
// pre-activations on entry.
inline void gate_update(std::size_t H, const double* c_prev, double* gates, double* c, double* tanh_c, double* h) {
  double* gi = gates;
  double* gf = gates + H;
  double* go = gates + 2 * H;
  double* gg = gates + 3 * H;
  for (std::size_t k = 0; k < H; ++k) {
    gi[k] = sigmoid(gi[k]);
    gf[k] = sigmoid(gf[k]);
    go[k] = sigmoid(go[k]);
    gg[k] = std::tanh(gg[k]);
    c[k] = gf[k] * c_prev[k] + gi[k] * gg[k];
    tanh_c[k] = std::tanh(c[k]);
    h[k] = go[k] * tanh_c[k];
  }
}

// BPTT through the gates of one sequence at one step. dh is the total
// gradient on h_t; dc_next carries dc from step t+1 in and dc to t-1 out.
inline void gate_backward(std::size_t H, const double* gates, const double* tc, const double* c_prev,
                          const double* dh, double* dc_next, double* dz) {
  const double* gi = gates;
  const double* gf = gates + H;
  const double* go = gates + 2 * H;
  const double* gg = gates + 3 * H;
  for (std::size_t k = 0; k < H; ++k) {
    const double d_o = dh[k] * tc[k];
    const double dc = dc_next[k] + dh[k] * go[k] * (1.0 - tc[k] * tc[k]);
    const double d_i = dc * gg[k];
    const double d_g = dc * gi[k];
    const double d_f = dc * c_prev[k];
    dc_next[k] = dc * gf[k];
    dz[k] = d_i * gi[k] * (1.0 - gi[k]);
    dz[H + k] = d_f * gf[k] * (1.0 - gf[k]);
    dz[2 * H + k] = d_o * go[k] * (1.0 - go[k]);
    dz[3 * H + k] = d_g * (1.0 - gg[k] * gg[k]);
  }
}

}  // namespace

std::span<const double> LstmBatchTrace::output(std::size_t t) const {
  const std::size_t stride = h.size() / (steps + 1);
  return std::span<const double>(h).subspan((t + 1) * stride, stride);
}

std::span<const double> LstmTrace::output(std::size_t t) const {
  const std::size_t hidden = h.size() / (steps + 1);
  return std::span<const double>(h).subspan((t + 1) * hidden, hidden);
}

LstmState LstmTrace::final_state() const {
  const std::size_t hidden = h.size() / (steps + 1);
  const auto off = static_cast<std::ptrdiff_t>(steps * hidden);
  const auto end = static_cast<std::ptrdiff_t>((steps + 1) * hidden);
  return {std::vector<double>(h.begin() + off, h.begin() + end),
          std::vector<double>(c.begin() + off, c.begin() + end)};
}

LstmLayer::LstmLayer(std::string name, std::size_t in, std::size_t hidden)
    : name_(std::move(name)),
      in_(in),
      hidden_(hidden),
      w_({in, 4 * hidden}),
      u_({hidden, 4 * hidden}),
      b_({4 * hidden}),
      gw_({in, 4 * hidden}),
      gu_({hidden, 4 * hidden}),
      gb_({4 * hidden}) {
  if (in == 0 || hidden == 0) throw ConfigError("lstm layer " + name_ + " has a zero dimension");
}

void LstmLayer::init_glorot(Rng& rng) {
  // Glorot per gate block: fan_in + fan_out = rows + hidden.
  const double w_limit = std::sqrt(6.0 / static_cast<double>(in_ + hidden_));
  const double u_limit = std::sqrt(6.0 / static_cast<double>(hidden_ + hidden_));
  for (double& v : w_.values()) v = rng.uniform(-w_limit, w_limit);
  for (double& v : u_.values()) v = rng.uniform(-u_limit, u_limit);
  b_.fill(0.0);
}

void LstmLayer::step_into(const double* x, const double* h_prev, const double* c_prev,
                          double* gates, double* c, double* tanh_c, double* h) const {
  const std::size_t g4 = 4 * hidden_;
  std::copy(b_.data(), b_.data() + g4, gates);
  std::span<double> z(gates, g4);
  kernels::accumulate_xw(w_.values(), in_, g4, std::span<const double>(x, in_), z);
  kernels::accumulate_xw(u_.values(), hidden_, g4, std::span<const double>(h_prev, hidden_), z);
  gate_update(hidden_, c_prev, gates, c, tanh_c, h);
}

LstmTrace LstmLayer::forward(std::span<const double> seq, std::size_t steps,
                             const LstmState& initial) const {
  if (steps == 0) throw ConfigError("lstm layer " + name_ + ": empty sequence");
  if (seq.size() != steps * in_) {
    throw ConfigError("lstm layer " + name_ + ": sequence size mismatch");
  }
  if (initial.h.size() != hidden_ || initial.c.size() != hidden_) {
    throw ConfigError("lstm layer " + name_ + ": initial state does not match hidden size");
  }
  LstmTrace tr;
  tr.steps = steps;
  tr.x.assign(seq.begin(), seq.end());
  tr.h.resize((steps + 1) * hidden_);
  tr.c.resize((steps + 1) * hidden_);
  tr.gates.resize(steps * 4 * hidden_);
  tr.tanh_c.resize(steps * hidden_);
  std::copy(initial.h.begin(), initial.h.end(), tr.h.begin());
  std::copy(initial.c.begin(), initial.c.end(), tr.c.begin());
  for (std::size_t t = 0; t < steps; ++t) {
    double* h = tr.h.data() + (t + 1) * hidden_;
    double* c = tr.c.data() + (t + 1) * hidden_;
    step_into(tr.x.data() + t * in_, tr.h.data() + t * hidden_, tr.c.data() + t * hidden_,
              tr.gates.data() + t * 4 * hidden_, c, tr.tanh_c.data() + t * hidden_, h);
    if (!all_finite(std::span<const double>(c, hidden_)) ||
        !all_finite(std::span<const double>(h, hidden_))) {
      throw NumericError("lstm layer " + name_ + ": non-finite state at step " + std::to_string(t));
    }
  }
  return tr;
}

LstmState LstmLayer::step(std::span<const double> x, const LstmState& state) const {
  if (x.size() != in_) throw ConfigError("lstm layer " + name_ + ": input size mismatch");
  LstmState next = LstmState::zeros(hidden_);
  std::vector<double> gates(4 * hidden_), tanh_c(hidden_);
  step_into(x.data(), state.h.data(), state.c.data(), gates.data(), next.c.data(), tanh_c.data(),
            next.h.data());
  return next;
}

LstmState LstmLayer::backward(const LstmTrace& tr, std::span<const double> dh_out,
                              std::span<double> dx) {
  const std::size_t H = hidden_;
  const std::size_t g4 = 4 * H;
  std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0), dz(g4), dh_prev(H), dh(H);
  for (std::size_t t = tr.steps; t-- > 0;) {
    for (std::size_t k = 0; k < H; ++k) dh[k] = dh_out[t * H + k] + dh_next[k];
    gate_backward(H, tr.gates.data() + t * g4, tr.tanh_c.data() + t * H, tr.c.data() + t * H, dh.data(),
                  dc_next.data(), dz.data());
    std::span<const double> x_t(tr.x.data() + t * in_, in_);
    std::span<const double> h_prev(tr.h.data() + t * H, H);
    kernels::accumulate_outer(gw_.values(), in_, g4, x_t, dz);
    kernels::accumulate_outer(gu_.values(), H, g4, h_prev, dz);
    for (std::size_t k = 0; k < g4; ++k) gb_[k] += dz[k];
    if (!dx.empty()) kernels::accumulate_wv(w_.values(), in_, g4, dz, dx.subspan(t * in_, in_));
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    kernels::accumulate_wv(u_.values(), H, g4, dz, dh_prev);
    dh_next.swap(dh_prev);
  }
  return {dh_next, dc_next};
}

LstmBatchTrace LstmLayer::forward_batch(std::span<const double> seq, std::size_t steps, std::size_t batch) const {
  if (steps == 0 || batch == 0) throw ConfigError("lstm layer " + name_ + ": empty batch");
  if (seq.size() != steps * batch * in_) throw ConfigError("lstm layer " + name_ + ": batch size mismatch");
  const std::size_t H = hidden_;
  const std::size_t g4 = 4 * H;
  LstmBatchTrace tr;
  tr.steps = steps;
  tr.batch = batch;
  tr.x.assign(seq.begin(), seq.end());
  tr.h.assign((steps + 1) * batch * H, 0.0);
  tr.c.assign((steps + 1) * batch * H, 0.0);
  tr.gates.resize(steps * batch * g4);
  tr.tanh_c.resize(steps * batch * H);
  for (std::size_t t = 0; t < steps; ++t) {
    std::span<double> z(tr.gates.data() + t * batch * g4, batch * g4);
    for (std::size_t b = 0; b < batch; ++b) std::copy(b_.data(), b_.data() + g4, z.begin() + b * g4);
    kernels::gemm(std::span<const double>(tr.x).subspan(t * batch * in_, batch * in_), w_.values(), z, batch, in_, g4);
    kernels::gemm(std::span<const double>(tr.h).subspan(t * batch * H, batch * H), u_.values(), z, batch, H, g4);
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t row = t * batch + b;
      gate_update(H, tr.c.data() + row * H, z.data() + b * g4, tr.c.data() + (row + batch) * H,
                  tr.tanh_c.data() + row * H, tr.h.data() + (row + batch) * H);
    }
    if (!all_finite(std::span<const double>(tr.c).subspan((t + 1) * batch * H, batch * H)) ||
        !all_finite(std::span<const double>(tr.h).subspan((t + 1) * batch * H, batch * H))) {
      throw NumericError("lstm layer " + name_ + ": non-finite state at step " + std::to_string(t));
    }
  }
  return tr;
}

void LstmLayer::backward_batch(const LstmBatchTrace& tr, std::span<const double> dh_out, std::span<double> dx) {
  const std::size_t H = hidden_;
  const std::size_t g4 = 4 * H;
  const std::size_t B = tr.batch;
  if (dh_out.size() != tr.steps * B * H || (!dx.empty() && dx.size() != tr.steps * B * in_)) {
    throw ConfigError("lstm layer " + name_ + ": batch gradient shape mismatch");
  }
  std::vector<double> wt(g4 * in_), ut(g4 * H);
  if (!dx.empty()) kernels::transpose(w_.values(), in_, g4, wt);
  kernels::transpose(u_.values(), H, g4, ut);
  std::vector<double> dh_next(B * H, 0.0), dc_next(B * H, 0.0), dz(B * g4), dh(B * H), xt, ht(H * B);
  xt.resize(in_ * B);
  for (std::size_t t = tr.steps; t-- > 0;) {
    for (std::size_t i = 0; i < B * H; ++i) dh[i] = dh_out[t * B * H + i] + dh_next[i];
    for (std::size_t b = 0; b < B; ++b) {
      const std::size_t row = t * B + b;
      gate_backward(H, tr.gates.data() + row * g4, tr.tanh_c.data() + row * H, tr.c.data() + row * H,
                    dh.data() + b * H, dc_next.data() + b * H, dz.data() + b * g4);
    }
    kernels::transpose(std::span<const double>(tr.x).subspan(t * B * in_, B * in_), B, in_, xt);
    kernels::gemm(xt, dz, gw_.values(), in_, B, g4);
    kernels::transpose(std::span<const double>(tr.h).subspan(t * B * H, B * H), B, H, ht);
    kernels::gemm(ht, dz, gu_.values(), H, B, g4);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t k = 0; k < g4; ++k) gb_[k] += dz[b * g4 + k];
    }
    if (!dx.empty()) kernels::gemm(dz, wt, dx.subspan(t * B * in_, B * in_), B, g4, in_);
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    kernels::gemm(dz, ut, dh_next, B, g4, H);
  }
}

void LstmLayer::append_params(ParamList& out) {
  out.push_back({name_ + ".W", &w_, &gw_});
  out.push_back({name_ + ".U", &u_, &gu_});
  out.push_back({name_ + ".b", &b_, &gb_});
}

}  // namespace adex::nn
