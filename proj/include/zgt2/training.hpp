#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "zgt2/data.hpp"
#include "zgt2/error.hpp"
#include "zgt2/grad.hpp"
#include "zgt2/params.hpp"

namespace zgt2 {

struct TrainConfig {
  int epochs = 100;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Quantiles quantiles;  // [0.005, 0.995]: 99% target coverage
  std::uint64_t seed = 1;
  /// Max-norm gradient clipping; 0 disables it.
  double clip_norm = 0.0;

  void validate() const;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update in place.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, double lr,
               double beta1, double beta2, double epsilon);

struct TraceRow {
  int epoch = 0;  // 1-based
  LossBreakdown loss;  // full training set, end of epoch
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  int best_epoch = 0;
  double best_loss = 0.0;
  std::uint64_t steps = 0;

  /// CSV with header "epoch,L,L_R,ell".
  void write_csv(std::ostream& out) const;
};

struct TrainResult {
  RawParams params;  // parameters of the best recorded epoch
  TrainTrace trace;
};

/// Minibatch Adam over the dual-focused loss. Each epoch shuffles the
/// training set with a seed derived from (seed, epoch). Initialisation uses
/// the "init" stream of train_cfg.seed unless `initial` is supplied.
/// Throws TrainingDiverged (a DivergenceError) carrying the partial trace.
TrainResult train(const Dataset& dataset, const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                  const RawParams* initial = nullptr);

class TrainingDiverged : public DivergenceError {
 public:
  TrainingDiverged(const DivergenceError& cause, TrainTrace trace)
      : DivergenceError(cause.what(), cause.group()), trace_(std::move(trace)) {}
  const TrainTrace& trace() const noexcept { return trace_; }

 private:
  TrainTrace trace_;
};

}  // namespace zgt2
