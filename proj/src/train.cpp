#include "dmcn/train.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "dmcn/rng.hpp"
#include "dmcn/tape.hpp"

namespace dmcn {

void TrainConfig::validate() const {
  if (!(lr0 > 0)) throw contract_error("TrainConfig: lr0 must be positive");
  if (!(beta1 > 0 && beta1 < 1 && beta2 > 0 && beta2 < 1))
    throw contract_error("TrainConfig: betas must lie in (0, 1)");
  if (batch_size < 1) throw contract_error("TrainConfig: batch_size >= 1");
  if (decay_every_epochs < 1)
    throw contract_error("TrainConfig: decay_every_epochs >= 1");
  if (epochs < 0) throw contract_error("TrainConfig: epochs must be >= 0");
}

double lr_at(int epoch, const TrainConfig& config) {
  if (epoch < 0) throw contract_error("lr_at: epoch must be >= 0");
  return config.lr0 *
         std::pow(config.decay_factor, epoch / config.decay_every_epochs);
}

void adam_step(const std::vector<ParamRef<float>>& params,
               const std::vector<const float*>& grads, OptimizerState& state,
               double lr, const TrainConfig& config) {
  if (params.size() != grads.size())
    throw contract_error("adam_step: gradient list does not mirror params");
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.m[i].assign(params[i].size, 0.0f);
      state.v[i].assign(params[i].size, 0.0f);
    }
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, state.t);
  const double bc2 = 1.0 - std::pow(config.beta2, state.t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    float* theta = params[i].data;
    const float* g = grads[i];
    float* m = state.m[i].data();
    float* v = state.v[i].data();
    for (std::size_t j = 0; j < params[i].size; ++j) {
      const double gj = g[j] + config.weight_decay * theta[j];
      m[j] = static_cast<float>(config.beta1 * m[j] + (1.0 - config.beta1) * gj);
      v[j] = static_cast<float>(config.beta2 * v[j] +
                                (1.0 - config.beta2) * gj * gj);
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      theta[j] = static_cast<float>(theta[j] -
                                    lr * mhat / (std::sqrt(vhat) + config.epsilon));
    }
  }
}

namespace {

TensorF to_batch(const PatchSet& patches, const std::vector<int>& order,
                 std::size_t begin, std::size_t end, bool hr) {
  const Image& first = patches.items[order[begin]].hr;
  TensorF batch(static_cast<int>(end - begin), first.channels, first.height,
                first.width);
  for (std::size_t i = begin; i < end; ++i) {
    const Image& img =
        hr ? patches.items[order[i]].hr : patches.items[order[i]].ilr;
    for (int c = 0; c < img.channels; ++c)
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
          batch.at(static_cast<int>(i - begin), c, y, x) = img.at(y, x, c);
  }
  return batch;
}

}  // namespace

std::vector<EpochStats> train(Model<float>& model, const PatchSet& patches,
                              const TrainConfig& config, OptimizerState& state,
                              int start_epoch, StepCallback on_step,
                              void* user_data) {
  config.validate();
  if (patches.items.empty()) throw contract_error("train: empty patch set");
  auto params = model.parameters();

  std::vector<EpochStats> history;
  std::vector<int> order(patches.items.size());
  for (int epoch = start_epoch; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::seed_seq seq{config.seed, static_cast<unsigned>(epoch)};
    std::mt19937 gen(seq);
    deterministic_shuffle(order, gen);

    const double lr = lr_at(epoch, config);
    double loss_sum = 0;
    int steps = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += config.batch_size) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(config.batch_size));
      TensorF input = to_batch(patches, order, begin, end, false);
      TensorF target = to_batch(patches, order, begin, end, true);

      Tape<float> tape;
      TapeForward<float> tf = model.forward(tape, input);
      const int loss_var = tape.l1_loss(tf.output, std::move(target));
      tape.backward(loss_var);

      std::vector<const float*> grads(params.size());
      for (std::size_t i = 0; i < params.size(); ++i)
        grads[i] = tape.grad(tf.param_vars[i]).data.data();
      adam_step(params, grads, state, lr, config);

      const double loss = tape.value(loss_var).data[0];
      loss_sum += loss;
      ++steps;
      if (on_step) on_step(epoch, steps, loss, user_data);
    }
    history.push_back({epoch, lr, loss_sum / steps});
  }
  return history;
}

}  // namespace dmcn
