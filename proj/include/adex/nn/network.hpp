#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adex/nn/dense.hpp"
#include "adex/nn/lstm.hpp"
#include "adex/nn/tensor.hpp"
#include "adex/rng.hpp"

namespace adex::nn {

inline constexpr std::size_t kHistoryLength = 5;
inline constexpr std::size_t kEgoMapSize = 625;
inline constexpr std::size_t kStateHidden = 64;
inline constexpr std::size_t kStateOut = 10;
inline constexpr std::size_t kMapHidden = 100;
inline constexpr std::size_t kFused = kStateOut + kMapHidden;

/// Fixed-length window of per-step inputs, oldest first. Slots that precede
/// the start of a sequence are zero.
class History {
 public:
  History() = default;
  History(std::size_t steps, std::size_t state_dim, std::size_t map_dim);

  std::size_t steps() const { return steps_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t map_dim() const { return map_dim_; }

  std::span<const double> state(std::size_t t) const;
  std::span<const double> map(std::size_t t) const;
  std::span<const double> states() const { return states_; }
  std::span<const double> maps() const { return maps_; }
  std::span<double> mutable_states() { return states_; }
  std::span<double> mutable_maps() { return maps_; }

  /// Drops the oldest slot and appends (state, map) as the newest.
  void push(std::span<const double> state, std::span<const double> map);
  void clear();

  friend bool operator==(const History&, const History&) = default;

 private:
  std::size_t steps_ = 0;
  std::size_t state_dim_ = 0;
  std::size_t map_dim_ = 0;
  std::vector<double> states_;
  std::vector<double> maps_;
};

struct NetworkSpec {
  std::string name;
  std::size_t state_dim = 31;
  std::size_t map_dim = kEgoMapSize;
  std::size_t output_dim = 5;
  Activation output = Activation::linear;
  std::size_t history = kHistoryLength;
  /// false replaces the LSTM by dense(110 -> 110, tanh) on the newest step.
  bool recurrent = true;
};

NetworkSpec navigation_spec(bool recurrent = true);
NetworkSpec actor_spec(bool recurrent = true);
NetworkSpec critic_spec(bool recurrent = true);

/// Two per-timestep branches fused into one recurrent layer:
///
///   state [S]  -> dense(64, relu) -> dense(10, relu)  --+
///                                                       +-> concat [110] -> LSTM(110) over the window -> head
///   map [625]  -> dense(100, relu) -> dense(100, relu) -+
///
/// The head reads the LSTM output of the newest step. The recurrent state
/// starts at zero for every window.
class PolicyNetwork {
 public:
  struct Trace {
    History input;
    std::vector<double> state_hidden;  // [T, 64]
    std::vector<double> state_out;     // [T, 10]
    std::vector<double> map_hidden;    // [T, 100]
    std::vector<double> map_out;       // [T, 100]
    std::vector<double> fused;         // [T, 110]
    std::optional<LstmTrace> lstm;
    std::vector<double> mixed;         // [110], non-recurrent variant only
    std::vector<double> output;
  };

  /// Batched forward record. Rows are time-major (row = t * batch + b) and
  /// cover the timesteps the head depends on: the whole window with the
  /// LSTM, only the newest step without it.
  struct BatchTrace {
    std::size_t batch = 0;
    std::size_t steps = 0;
    std::vector<double> states;        // [steps * B, S]
    std::vector<double> maps;          // [steps * B, M]
    std::vector<double> state_hidden;  // [steps * B, 64]
    std::vector<double> state_out;     // [steps * B, 10]
    std::vector<double> map_hidden;    // [steps * B, 100]
    std::vector<double> map_out;       // [steps * B, 100]
    std::vector<double> fused;         // [steps * B, 110]
    std::optional<LstmBatchTrace> lstm;
    std::vector<double> mixed;         // [B, 110]
    std::vector<double> output;        // [B, out]

    std::span<const double> output_row(std::size_t b) const;
  };

  explicit PolicyNetwork(NetworkSpec spec);

  const NetworkSpec& spec() const { return spec_; }

  void initialize(Rng& rng);

  std::vector<double> forward(const History& input) const;

  /// Per-timestep branch features [110] for a single (state, map) pair.
  /// forward() == decide(encode(t) for every t).
  std::vector<double> encode(std::span<const double> state, std::span<const double> map) const;

  /// Runs the recurrent part and the head on [steps, 110] features.
  std::vector<double> decide(std::span<const double> features) const;

  Trace forward_trace(const History& input) const;

  /// Accumulates parameter gradients for d(loss)/d(output).
  void backward(const Trace& trace, std::span<const double> d_output);

  /// Many windows at once through matrix-matrix kernels. Output row b
  /// equals forward(*inputs[b]) bit for bit.
  BatchTrace forward_batch(std::span<const History* const> inputs) const;

  /// d_output is [B, out]; gradients of all rows are accumulated.
  void backward_batch(const BatchTrace& trace, std::span<const double> d_output);

  ParamList parameters();

  void copy_parameters_from(PolicyNetwork& other);

 private:
  void check_input(const History& input) const;
  std::size_t live_steps() const { return lstm_ ? spec_.history : 1; }

  NetworkSpec spec_;
  DenseLayer state1_, state2_, map1_, map2_;
  std::optional<LstmLayer> lstm_;
  std::optional<DenseLayer> mix_;
  DenseLayer head_;
};

}  // namespace adex::nn
