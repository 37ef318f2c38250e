#pragma once

#include <map>
#include <string>
#include <vector>

#include "dmcn/data.hpp"
#include "dmcn/loss.hpp"
#include "dmcn/model.hpp"

namespace dmcn {

struct TrainConfig {
  double lr0 = 5e-4;
  int decay_every_epochs = 10;
  double decay_factor = 0.1;
  int batch_size = 128;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-4;
  int epochs = 0;  // no paper default; must be set by the caller
  unsigned seed = 0;

  void validate() const;
};

// Adam first/second moments, flat per parameter in Model::parameters()
// order, plus the step counter.
struct OptimizerState {
  std::vector<std::vector<float>> m;
  std::vector<std::vector<float>> v;
  long t = 0;
};

double lr_at(int epoch, const TrainConfig& config);

// Classic Adam with bias correction; weight decay is coupled (added to the
// gradient before the moment updates).
void adam_step(const std::vector<ParamRef<float>>& params,
               const std::vector<const float*>& grads, OptimizerState& state,
               double lr, const TrainConfig& config);

struct EpochStats {
  int epoch = 0;
  double lr = 0;
  double mean_loss = 0;
};

using StepCallback =
    void (*)(int epoch, int step, double loss, void* user_data);

// Mini-batch loop: per-epoch deterministic shuffle keyed by (seed, epoch),
// forward -> L1 -> backward -> adam.  The last partial batch is kept.
// start_epoch lets a checkpointed run resume mid-schedule.
std::vector<EpochStats> train(Model<float>& model, const PatchSet& patches,
                              const TrainConfig& config,
                              OptimizerState& state, int start_epoch = 0,
                              StepCallback on_step = nullptr,
                              void* user_data = nullptr);

struct Checkpoint {
  ModelConfig model_config;
  std::map<std::string, std::pair<std::vector<int>, std::vector<float>>>
      tensors;  // name -> (dims, data)
  OptimizerState opt;
  int epoch = 0;
  std::vector<float> loss_history;
};

void save_checkpoint(const std::string& path, Model<float>& model,
                     const OptimizerState& opt, int epoch,
                     const std::vector<float>& loss_history);

Checkpoint load_checkpoint(const std::string& path);

// Copies the checkpoint tensors into a model built from its stored config.
// Throws contract_error naming the first divergent tensor if the given
// config does not match.
Model<float> restore_model(const Checkpoint& ckpt);
void apply_checkpoint(const Checkpoint& ckpt, Model<float>& model);

}  // namespace dmcn
