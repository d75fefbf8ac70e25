#include "adex/nn/network.hpp"

#include <algorithm>

#include "adex/error.hpp"
#include "adex/nn/adam.hpp"

namespace adex::nn {

History::History(std::size_t steps, std::size_t state_dim, std::size_t map_dim)
    : steps_(steps),
      state_dim_(state_dim),
      map_dim_(map_dim),
      states_(steps * state_dim, 0.0),
      maps_(steps * map_dim, 0.0) {}

std::span<const double> History::state(std::size_t t) const {
  return std::span<const double>(states_).subspan(t * state_dim_, state_dim_);
}

std::span<const double> History::map(std::size_t t) const {
  return std::span<const double>(maps_).subspan(t * map_dim_, map_dim_);
}

void History::push(std::span<const double> state, std::span<const double> map) {
  if (state.size() != state_dim_ || map.size() != map_dim_) {
    throw ConfigError("history push: wrong input width");
  }
  if (steps_ == 0) return;
  std::copy(states_.begin() + static_cast<std::ptrdiff_t>(state_dim_), states_.end(), states_.begin());
  std::copy(maps_.begin() + static_cast<std::ptrdiff_t>(map_dim_), maps_.end(), maps_.begin());
  std::copy(state.begin(), state.end(), states_.end() - static_cast<std::ptrdiff_t>(state_dim_));
  std::copy(map.begin(), map.end(), maps_.end() - static_cast<std::ptrdiff_t>(map_dim_));
}

void History::clear() {
  std::fill(states_.begin(), states_.end(), 0.0);
  std::fill(maps_.begin(), maps_.end(), 0.0);
}

NetworkSpec navigation_spec(bool recurrent) {
  return {"nav", 31, kEgoMapSize, 5, Activation::linear, kHistoryLength, recurrent};
}

NetworkSpec actor_spec(bool recurrent) {
  return {"actor", 29, kEgoMapSize, 5, Activation::softmax, kHistoryLength, recurrent};
}

NetworkSpec critic_spec(bool recurrent) {
  return {"critic", 29, kEgoMapSize, 1, Activation::linear, kHistoryLength, recurrent};
}

PolicyNetwork::PolicyNetwork(NetworkSpec spec)
    : spec_(std::move(spec)),
      state1_(spec_.name + ".state1", spec_.state_dim, kStateHidden, Activation::relu),
      state2_(spec_.name + ".state2", kStateHidden, kStateOut, Activation::relu),
      map1_(spec_.name + ".map1", spec_.map_dim, kMapHidden, Activation::relu),
      map2_(spec_.name + ".map2", kMapHidden, kMapHidden, Activation::relu),
      head_(spec_.name + ".head", kFused, spec_.output_dim, spec_.output) {
  if (spec_.history == 0) throw ConfigError("network history must be at least 1");
  if (spec_.recurrent) {
    lstm_.emplace(spec_.name + ".lstm", kFused, kFused);
  } else {
    mix_.emplace(spec_.name + ".mix", kFused, kFused, Activation::tanh);
  }
}

void PolicyNetwork::initialize(Rng& rng) {
  state1_.init_glorot(rng);
  state2_.init_glorot(rng);
  map1_.init_glorot(rng);
  map2_.init_glorot(rng);
  if (lstm_) lstm_->init_glorot(rng);
  if (mix_) mix_->init_glorot(rng);
  head_.init_glorot(rng);
}

void PolicyNetwork::check_input(const History& input) const {
  if (input.steps() != spec_.history || input.state_dim() != spec_.state_dim ||
      input.map_dim() != spec_.map_dim) {
    throw ConfigError(spec_.name + ": expected history [" + std::to_string(spec_.history) + "," +
                      std::to_string(spec_.state_dim) + "] + [" + std::to_string(spec_.history) +
                      "," + std::to_string(spec_.map_dim) + "]");
  }
}

std::vector<double> PolicyNetwork::encode(std::span<const double> state,
                                          std::span<const double> map) const {
  std::vector<double> s1(kStateHidden), m1(kMapHidden), features(kFused);
  state1_.forward(state, s1);
  state2_.forward(s1, std::span<double>(features).first(kStateOut));
  map1_.forward(map, m1);
  map2_.forward(m1, std::span<double>(features).subspan(kStateOut, kMapHidden));
  return features;
}

std::vector<double> PolicyNetwork::decide(std::span<const double> features) const {
  const std::size_t steps = features.size() / kFused;
  if (steps == 0 || steps * kFused != features.size()) {
    throw ConfigError(spec_.name + ": feature window must be a multiple of 110");
  }
  std::vector<double> top;
  if (lstm_) {
    auto state = LstmState::zeros(kFused);
    for (std::size_t t = 0; t < steps; ++t) state = lstm_->step(features.subspan(t * kFused, kFused), state);
    top = std::move(state.h);
  } else {
    top = mix_->forward(features.subspan((steps - 1) * kFused, kFused));
  }
  return head_.forward(top);
}

std::vector<double> PolicyNetwork::forward(const History& input) const {
  check_input(input);
  std::vector<double> features;
  features.reserve(spec_.history * kFused);
  // Without the LSTM only the newest step reaches the head.
  for (std::size_t t = spec_.history - live_steps(); t < spec_.history; ++t) {
    const auto f = encode(input.state(t), input.map(t));
    features.insert(features.end(), f.begin(), f.end());
  }
  return decide(features);
}

PolicyNetwork::Trace PolicyNetwork::forward_trace(const History& input) const {
  check_input(input);
  const std::size_t T = spec_.history;
  Trace tr;
  tr.input = input;
  tr.state_hidden.resize(T * kStateHidden);
  tr.state_out.resize(T * kStateOut);
  tr.map_hidden.resize(T * kMapHidden);
  tr.map_out.resize(T * kMapHidden);
  tr.fused.resize(T * kFused);
  for (std::size_t t = 0; t < T; ++t) {
    std::span<double> sh(tr.state_hidden.data() + t * kStateHidden, kStateHidden);
    std::span<double> so(tr.state_out.data() + t * kStateOut, kStateOut);
    std::span<double> mh(tr.map_hidden.data() + t * kMapHidden, kMapHidden);
    std::span<double> mo(tr.map_out.data() + t * kMapHidden, kMapHidden);
    state1_.forward(input.state(t), sh);
    state2_.forward(sh, so);
    map1_.forward(input.map(t), mh);
    map2_.forward(mh, mo);
    std::copy(so.begin(), so.end(), tr.fused.begin() + static_cast<std::ptrdiff_t>(t * kFused));
    std::copy(mo.begin(), mo.end(),
              tr.fused.begin() + static_cast<std::ptrdiff_t>(t * kFused + kStateOut));
  }
  std::span<const double> top;
  if (lstm_) {
    tr.lstm = lstm_->forward(tr.fused, T, LstmState::zeros(kFused));
    top = tr.lstm->output(T - 1);
  } else {
    tr.mixed = mix_->forward(std::span<const double>(tr.fused).subspan((T - 1) * kFused, kFused));
    top = tr.mixed;
  }
  tr.output = head_.forward(top);
  return tr;
}

void PolicyNetwork::backward(const Trace& tr, std::span<const double> d_output) {
  if (d_output.size() != spec_.output_dim) throw ConfigError(spec_.name + ": output gradient width");
  const std::size_t T = spec_.history;
  std::vector<double> d_fused(T * kFused, 0.0);
  std::vector<double> d_top(kFused, 0.0);
  if (lstm_) {
    head_.backward(tr.lstm->output(T - 1), tr.output, d_output, d_top);
    std::vector<double> dh(T * kFused, 0.0);
    std::copy(d_top.begin(), d_top.end(), dh.begin() + static_cast<std::ptrdiff_t>((T - 1) * kFused));
    lstm_->backward(*tr.lstm, dh, d_fused);
  } else {
    head_.backward(tr.mixed, tr.output, d_output, d_top);
    std::span<const double> last(tr.fused.data() + (T - 1) * kFused, kFused);
    mix_->backward(last, tr.mixed, d_top, std::span<double>(d_fused).subspan((T - 1) * kFused, kFused));
  }
  std::vector<double> d_hidden_s(kStateHidden), d_hidden_m(kMapHidden);
  for (std::size_t t = 0; t < T; ++t) {
    std::span<const double> dfs(d_fused.data() + t * kFused, kStateOut);
    std::span<const double> dfm(d_fused.data() + t * kFused + kStateOut, kMapHidden);
    const bool state_live = std::any_of(dfs.begin(), dfs.end(), [](double v) { return v != 0.0; });
    const bool map_live = std::any_of(dfm.begin(), dfm.end(), [](double v) { return v != 0.0; });
    std::span<const double> sh(tr.state_hidden.data() + t * kStateHidden, kStateHidden);
    std::span<const double> so(tr.state_out.data() + t * kStateOut, kStateOut);
    std::span<const double> mh(tr.map_hidden.data() + t * kMapHidden, kMapHidden);
    std::span<const double> mo(tr.map_out.data() + t * kMapHidden, kMapHidden);
    if (state_live) {
      std::fill(d_hidden_s.begin(), d_hidden_s.end(), 0.0);
      state2_.backward(sh, so, dfs, d_hidden_s);
      state1_.backward(tr.input.state(t), sh, d_hidden_s, {});
    }
    if (map_live) {
      std::fill(d_hidden_m.begin(), d_hidden_m.end(), 0.0);
      map2_.backward(mh, mo, dfm, d_hidden_m);
      map1_.backward(tr.input.map(t), mh, d_hidden_m, {});
    }
  }
}

std::span<const double> PolicyNetwork::BatchTrace::output_row(std::size_t b) const {
  const std::size_t width = output.size() / batch;
  return std::span<const double>(output).subspan(b * width, width);
}

PolicyNetwork::BatchTrace PolicyNetwork::forward_batch(std::span<const History* const> inputs) const {
  if (inputs.empty()) throw ConfigError(spec_.name + ": empty batch");
  const std::size_t B = inputs.size();
  const std::size_t T = live_steps();
  const std::size_t first = spec_.history - T;
  const std::size_t S = spec_.state_dim;
  const std::size_t M = spec_.map_dim;
  const std::size_t R = T * B;
  BatchTrace tr;
  tr.batch = B;
  tr.steps = T;
  tr.states.resize(R * S);
  tr.maps.resize(R * M);
  for (std::size_t b = 0; b < B; ++b) {
    check_input(*inputs[b]);
    for (std::size_t t = 0; t < T; ++t) {
      const auto st = inputs[b]->state(first + t);
      const auto mp = inputs[b]->map(first + t);
      std::copy(st.begin(), st.end(), tr.states.begin() + static_cast<std::ptrdiff_t>((t * B + b) * S));
      std::copy(mp.begin(), mp.end(), tr.maps.begin() + static_cast<std::ptrdiff_t>((t * B + b) * M));
    }
  }
  tr.state_hidden.resize(R * kStateHidden);
  tr.state_out.resize(R * kStateOut);
  tr.map_hidden.resize(R * kMapHidden);
  tr.map_out.resize(R * kMapHidden);
  state1_.forward_batch(tr.states, R, tr.state_hidden);
  state2_.forward_batch(tr.state_hidden, R, tr.state_out);
  map1_.forward_batch(tr.maps, R, tr.map_hidden);
  map2_.forward_batch(tr.map_hidden, R, tr.map_out);
  tr.fused.resize(R * kFused);
  for (std::size_t r = 0; r < R; ++r) {
    std::copy_n(tr.state_out.begin() + static_cast<std::ptrdiff_t>(r * kStateOut), kStateOut,
                tr.fused.begin() + static_cast<std::ptrdiff_t>(r * kFused));
    std::copy_n(tr.map_out.begin() + static_cast<std::ptrdiff_t>(r * kMapHidden), kMapHidden,
                tr.fused.begin() + static_cast<std::ptrdiff_t>(r * kFused + kStateOut));
  }
  std::span<const double> top;
  if (lstm_) {
    tr.lstm = lstm_->forward_batch(tr.fused, T, B);
    top = tr.lstm->output(T - 1);
  } else {
    tr.mixed.resize(B * kFused);
    mix_->forward_batch(tr.fused, B, tr.mixed);
    top = tr.mixed;
  }
  tr.output.resize(B * spec_.output_dim);
  head_.forward_batch(top, B, tr.output);
  return tr;
}

void PolicyNetwork::backward_batch(const BatchTrace& tr, std::span<const double> d_output) {
  const std::size_t B = tr.batch;
  const std::size_t T = tr.steps;
  const std::size_t R = T * B;
  if (d_output.size() != B * spec_.output_dim) throw ConfigError(spec_.name + ": output gradient shape");
  std::vector<double> d_top(B * kFused, 0.0);
  std::vector<double> d_fused(R * kFused, 0.0);
  if (lstm_) {
    head_.backward_batch(tr.lstm->output(T - 1), tr.output, d_output, B, d_top);
    std::vector<double> dh(R * kFused, 0.0);
    std::copy(d_top.begin(), d_top.end(), dh.begin() + static_cast<std::ptrdiff_t>((T - 1) * B * kFused));
    lstm_->backward_batch(*tr.lstm, dh, d_fused);
  } else {
    head_.backward_batch(tr.mixed, tr.output, d_output, B, d_top);
    mix_->backward_batch(tr.fused, tr.mixed, d_top, B, d_fused);
  }
  std::vector<double> d_state_out(R * kStateOut), d_map_out(R * kMapHidden);
  for (std::size_t r = 0; r < R; ++r) {
    std::copy_n(d_fused.begin() + static_cast<std::ptrdiff_t>(r * kFused), kStateOut,
                d_state_out.begin() + static_cast<std::ptrdiff_t>(r * kStateOut));
    std::copy_n(d_fused.begin() + static_cast<std::ptrdiff_t>(r * kFused + kStateOut), kMapHidden,
                d_map_out.begin() + static_cast<std::ptrdiff_t>(r * kMapHidden));
  }
  std::vector<double> d_state_hidden(R * kStateHidden, 0.0), d_map_hidden(R * kMapHidden, 0.0);
  state2_.backward_batch(tr.state_hidden, tr.state_out, d_state_out, R, d_state_hidden);
  state1_.backward_batch(tr.states, tr.state_hidden, d_state_hidden, R, {});
  map2_.backward_batch(tr.map_hidden, tr.map_out, d_map_out, R, d_map_hidden);
  map1_.backward_batch(tr.maps, tr.map_hidden, d_map_hidden, R, {});
}

ParamList PolicyNetwork::parameters() {
  ParamList out;
  state1_.append_params(out);
  state2_.append_params(out);
  map1_.append_params(out);
  map2_.append_params(out);
  if (lstm_) lstm_->append_params(out);
  if (mix_) mix_->append_params(out);
  head_.append_params(out);
  return out;
}

void PolicyNetwork::copy_parameters_from(PolicyNetwork& other) {
  if (other.spec_.recurrent != spec_.recurrent || other.spec_.state_dim != spec_.state_dim ||
      other.spec_.output_dim != spec_.output_dim) {
    throw ConfigError("cannot copy parameters between different architectures");
  }
  copy_values(other.parameters(), parameters());
}

}  // namespace adex::nn
