#include "zgt2/training.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "zgt2/error.hpp"
#include "zgt2/rng.hpp"

namespace zgt2 {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (clip_norm < 0.0) throw ConfigError("clip norm must be >= 0");
  quantiles.validate();
}

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, double lr,
               double beta1, double beta2, double epsilon) {
  if (grad.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw ShapeError("Adam state does not match the parameter vector");
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + epsilon);
  }
}

void TrainTrace::write_csv(std::ostream& out) const {
  out << "epoch,L,L_R,ell\n";
  const auto old = out.precision(17);
  for (const auto& r : rows) {
    out << r.epoch << ',' << r.loss.total << ',' << r.loss.accuracy << ',' << r.loss.pinball
        << '\n';
  }
  out.precision(old);
}

TrainResult train(const Dataset& dataset, const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                  const RawParams* initial) {
  model_cfg.validate();
  train_cfg.validate();
  if (dataset.size() == 0) throw DataError("training set is empty");

  TrainResult result;
  RawParams raw = initial ? *initial
                          : init_params(dataset, model_cfg, derive_seed(train_cfg.seed, "init"));
  result.params = raw;
  const LossOptions options{train_cfg.quantiles, true};
  const BatchView full{dataset.features, dataset.targets};

  AdamState adam(raw.values.size());
  std::vector<double> grad;
  std::vector<std::size_t> order(dataset.size());
  const auto mbs = static_cast<std::size_t>(train_cfg.batch_size);
  auto& trace = result.trace;

  try {
    for (int epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng rng(derive_seed(train_cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

      for (std::size_t start = 0; start < order.size(); start += mbs) {
        const auto rows = std::span(order).subspan(start, std::min(mbs, order.size() - start));
        loss_and_grad(raw, BatchView{dataset.features, dataset.targets, rows}, model_cfg, options,
                      grad);
        if (train_cfg.clip_norm > 0.0) {
          double norm = 0.0;
          for (double g : grad) norm += g * g;
          norm = std::sqrt(norm);
          if (norm > train_cfg.clip_norm) {
            for (double& g : grad) g *= train_cfg.clip_norm / norm;
          }
        }
        adam_step(raw.values, grad, adam, train_cfg.learning_rate, train_cfg.beta1,
                  train_cfg.beta2, train_cfg.epsilon);
        ++trace.steps;
      }

      const auto loss = evaluate_loss(raw, full, model_cfg, options);
      if (!std::isfinite(loss.total)) {
        throw DivergenceError("non-finite training loss after epoch " + std::to_string(epoch),
                              "?");
      }
      trace.rows.push_back({epoch, loss});
      if (trace.rows.size() == 1 || loss.total < trace.best_loss) {
        trace.best_loss = loss.total;
        trace.best_epoch = epoch;
        result.params = raw;
      }
    }
  } catch (const DivergenceError& e) {
    throw TrainingDiverged(e, trace);
  }
  return result;
}

}  // namespace zgt2
