#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "adex/nn/tensor.hpp"
#include "adex/rng.hpp"

namespace adex::nn {

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;

  static LstmState zeros(std::size_t hidden) { return {std::vector<double>(hidden), std::vector<double>(hidden)}; }
  friend bool operator==(const LstmState&, const LstmState&) = default;
};

/// Everything BPTT needs from one forward pass over a sequence.
struct LstmTrace {
  std::size_t steps = 0;
  std::vector<double> x;      // [T, in]
  std::vector<double> h;      // [T + 1, H], row 0 is the initial state
  std::vector<double> c;      // [T + 1, H]
  std::vector<double> gates;  // [T, 4H] post-activation, blocks (i, f, o, g)
  std::vector<double> tanh_c; // [T, H]

  std::span<const double> output(std::size_t t) const;  // h after step t
  LstmState final_state() const;
};

/// Forward record for a batch of equal-length sequences, time-major:
/// x is [T, B, in], h and c are [T + 1, B, H] (zero initial state), gates
/// [T, B, 4H], tanh_c [T, B, H].
struct LstmBatchTrace {
  std::size_t steps = 0;
  std::size_t batch = 0;
  std::vector<double> x;
  std::vector<double> h;
  std::vector<double> c;
  std::vector<double> gates;
  std::vector<double> tanh_c;

  /// [B, H] outputs of step t.
  std::span<const double> output(std::size_t t) const;
};

/// Single-layer LSTM. The four gate parameter sets are stored side by side:
/// W is [in, 4H], U is [H, 4H] and b is [4H], with column blocks ordered
/// input, forget, output, candidate.
class LstmLayer {
 public:
  LstmLayer(std::string name, std::size_t in, std::size_t hidden);

  std::size_t in_size() const { return in_; }
  std::size_t hidden_size() const { return hidden_; }

  void init_glorot(Rng& rng);

  /// seq is [T, in] row-major. Throws NumericError naming the step on NaN/Inf.
  LstmTrace forward(std::span<const double> seq, std::size_t steps, const LstmState& initial) const;

  /// All sequences from a zero state. Sequence b of the result matches
  /// forward() on that sequence bit for bit.
  LstmBatchTrace forward_batch(std::span<const double> seq, std::size_t steps, std::size_t batch) const;

  /// dh_out is [T, B, H]; dx, if non-empty, is [T, B, in] and accumulated into.
  void backward_batch(const LstmBatchTrace& trace, std::span<const double> dh_out, std::span<double> dx);

  /// One recurrence step.
  LstmState step(std::span<const double> x, const LstmState& state) const;

  /// dh_out is [T, H] (gradient w.r.t. each step's output). dx, if non-empty,
  /// is [T, in] and accumulated into. Returns the gradient w.r.t. the initial state.
  LstmState backward(const LstmTrace& trace, std::span<const double> dh_out, std::span<double> dx);

  Tensor& input_weights() { return w_; }
  Tensor& recurrent_weights() { return u_; }
  Tensor& bias() { return b_; }

  void append_params(ParamList& out);

 private:
  void step_into(const double* x, const double* h_prev, const double* c_prev, double* gates,
                 double* c, double* tanh_c, double* h) const;

  std::string name_;
  std::size_t in_;
  std::size_t hidden_;
  Tensor w_, u_, b_, gw_, gu_, gb_;
};

}  // namespace adex::nn
