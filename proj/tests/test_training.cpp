#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "dmcn/grad_check.hpp"
#include "dmcn/train.hpp"
#include "test_helpers.hpp"

using namespace dmcn;
using dmcn::testing::random_tensor;

namespace {

PatchSet random_patches(int count, int size, unsigned seed) {
  PatchSet set;
  std::mt19937 gen(seed);
  for (int i = 0; i < count; ++i) {
    PatchPair p;
    p.hr = Image(size, size, 1);
    p.ilr = Image(size, size, 1);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const float v = static_cast<float>(uniform01(gen));
        p.hr.at(y, x) = v;
        p.ilr.at(y, x) =
            std::min(1.0f, std::max(0.0f, v + 0.1f * (static_cast<float>(
                                                          uniform01(gen)) -
                                                      0.5f)));
      }
    set.items.push_back(std::move(p));
  }
  return set;
}

void zero_residual_branches(Model<float>& model) {
  for (auto& layer : model.layers) {
    if (layer.kind != LayerKind::Conv) continue;
    if (layer.name == "output" ||
        layer.name.find(".conv2") != std::string::npos) {
      for (auto& v : layer.conv.weights.data) v = 0;
      for (auto& v : layer.conv.bias) v = 0;
    }
  }
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("l1_loss values and gradient") {
  std::mt19937 gen(1);
  TensorD a = random_tensor<double>({2, 1, 4, 4}, gen);
  CHECK(l1_loss(a, a) == 0.0);

  TensorD b = a;
  for (auto& v : b.data) v += 0.5;
  CHECK(l1_loss(b, a) == doctest::Approx(0.5).epsilon(1e-12));

  TensorD bad(2, 1, 4, 5);
  CHECK_THROWS_AS(l1_loss(a, bad), contract_error);

  // FD away from the kink.
  TensorD target = a;
  for (std::size_t i = 0; i < target.data.size(); ++i)
    target.data[i] += (i % 2 ? 0.3 : -0.3);
  auto f = [&](const std::vector<TensorD>& in) {
    return static_cast<double>(l1_loss(in[0], target));
  };
  CHECK(grad_check(f, {a}, {l1_loss_grad(a, target)}) < 1e-4);
}

TEST_CASE("l1_loss is non-negative and zero only at equality") {
  std::mt19937 gen(2);
  for (int t = 0; t < 20; ++t) {
    TensorD a = random_tensor<double>({1, 1, 5, 5}, gen);
    TensorD b = random_tensor<double>({1, 1, 5, 5}, gen);
    const double l = l1_loss(a, b);
    CHECK(l >= 0);
    if (a.data != b.data) CHECK(l > 0);
  }
}

TEST_CASE("lr_at step decay") {
  TrainConfig cfg;
  CHECK(lr_at(0, cfg) == doctest::Approx(5e-4));
  CHECK(lr_at(9, cfg) == doctest::Approx(5e-4));
  CHECK(lr_at(10, cfg) == doctest::Approx(5e-5));
  CHECK(lr_at(25, cfg) == doctest::Approx(5e-6));
  double prev = lr_at(0, cfg);
  for (int e = 1; e < 50; ++e) {
    CHECK(lr_at(e, cfg) <= prev);
    prev = lr_at(e, cfg);
  }
  CHECK_THROWS_AS(lr_at(-1, cfg), contract_error);
}

TEST_CASE("adam_step hand-evaluated cases") {
  TrainConfig cfg;
  cfg.weight_decay = 0;

  SUBCASE("zero grads leave theta unchanged, t increments") {
    float theta = 0.7f;
    std::vector<ParamRef<float>> params{{"p", {1}, &theta, 1}};
    float zero = 0.0f;
    OptimizerState st;
    adam_step(params, {&zero}, st, 1e-3, cfg);
    CHECK(theta == 0.7f);
    CHECK(st.t == 1);
  }

  SUBCASE("first-step update magnitude is about lr") {
    float theta = 0.0f;
    std::vector<ParamRef<float>> params{{"p", {1}, &theta, 1}};
    float g = 1.0f;
    OptimizerState st;
    adam_step(params, {&g}, st, 1e-3, cfg);
    // bias-corrected first step: lr * 1/(1 + eps)
    CHECK(theta == doctest::Approx(-1e-3).epsilon(1e-4));
  }

  SUBCASE("identical parameters with identical grads move identically") {
    float t1 = 0.3f, t2 = 0.3f;
    std::vector<ParamRef<float>> params{{"a", {1}, &t1, 1},
                                        {"b", {1}, &t2, 1}};
    float g = -0.8f;
    OptimizerState st;
    for (int i = 0; i < 5; ++i) adam_step(params, {&g, &g}, st, 1e-3, cfg);
    CHECK(t1 == t2);
    CHECK(st.t == 5);
  }
}

TEST_CASE("train: batching, identity start, contracts") {
  ModelConfig mc;
  mc.channels = 8;
  mc.blocks_per_stage = 1;
  mc.seed = 5;
  TrainConfig tc;
  tc.epochs = 3;
  tc.seed = 9;

  SUBCASE("10 patches with batch 128 is one batch per epoch") {
    auto model = build_model<float>(mc);
    PatchSet set = random_patches(10, 16, 1);
    OptimizerState st;
    int steps = 0;
    train(model, set, tc, st, 0,
          [](int, int, double, void* user) { ++*static_cast<int*>(user); },
          &steps);
    CHECK(steps == 3);  // one step per epoch
    CHECK(st.t == 3);
  }

  SUBCASE("identity model with targets == inputs keeps loss exactly 0") {
    auto model = build_model<float>(mc);
    zero_residual_branches(model);
    PatchSet set = random_patches(6, 16, 2);
    for (auto& p : set.items) p.hr = p.ilr;  // targets equal inputs
    OptimizerState st;
    auto hist = train(model, set, tc, st);
    for (const auto& e : hist) CHECK(e.mean_loss == 0.0);
  }

  SUBCASE("empty patch set rejected") {
    auto model = build_model<float>(mc);
    PatchSet empty;
    OptimizerState st;
    CHECK_THROWS_AS(train(model, empty, tc, st), contract_error);
  }
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
  ModelConfig mc;
  mc.channels = 6;
  mc.blocks_per_stage = 1;
  mc.seed = 21;
  TrainConfig tc;
  tc.epochs = 4;
  tc.batch_size = 3;
  tc.seed = 77;
  PatchSet set = random_patches(7, 16, 3);

  auto run = [&]() {
    auto model = build_model<float>(mc);
    OptimizerState st;
    auto hist = train(model, set, tc, st);
    std::vector<double> losses;
    for (const auto& e : hist) losses.push_back(e.mean_loss);
    // Include final params in the fingerprint.
    for (const auto& p : model.parameters())
      for (std::size_t i = 0; i < p.size; ++i) losses.push_back(p.data[i]);
    return losses;
  };
  CHECK(run() == run());
}

TEST_CASE("single adam step decreases the loss in most seeded trials") {
  int wins = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    ModelConfig mc;
    mc.channels = 8;
    mc.blocks_per_stage = 1;
    mc.seed = 100 + t;
    auto model = build_model<float>(mc);
    PatchSet set = random_patches(4, 16, 200 + t);
    TrainConfig tc;
    tc.epochs = 1;
    tc.lr0 = 1e-4;
    tc.batch_size = 4;
    tc.seed = t;

    auto batch_loss = [&]() {
      TensorF input(4, 1, 16, 16), target(4, 1, 16, 16);
      for (int i = 0; i < 4; ++i)
        for (int y = 0; y < 16; ++y)
          for (int x = 0; x < 16; ++x) {
            input.at(i, 0, y, x) = set.items[i].ilr.at(y, x);
            target.at(i, 0, y, x) = set.items[i].hr.at(y, x);
          }
      return static_cast<double>(l1_loss(model.forward(input), target));
    };
    const double before = batch_loss();
    OptimizerState st;
    train(model, set, tc, st);
    if (batch_loss() <= before) ++wins;
  }
  CHECK(wins >= 19);  // >= 95%
}

TEST_CASE("checkpoint round trip is bit-exact") {
  ModelConfig mc;
  mc.channels = 6;
  mc.blocks_per_stage = 1;
  mc.seed = 31;
  auto model = build_model<float>(mc);
  PatchSet set = random_patches(4, 16, 4);
  TrainConfig tc;
  tc.epochs = 2;
  tc.seed = 8;
  OptimizerState st;
  auto hist = train(model, set, tc, st);

  const std::string path = temp_path("dmcn_test_ckpt.bin");
  std::vector<float> losses;
  for (const auto& e : hist) losses.push_back(static_cast<float>(e.mean_loss));
  save_checkpoint(path, model, st, 1, losses);

  Checkpoint ckpt = load_checkpoint(path);
  CHECK(ckpt.model_config == mc);
  CHECK(ckpt.epoch == 1);
  CHECK(ckpt.loss_history == losses);
  CHECK(ckpt.opt.t == st.t);
  REQUIRE(ckpt.opt.m.size() == st.m.size());
  for (std::size_t i = 0; i < st.m.size(); ++i) {
    CHECK(ckpt.opt.m[i] == st.m[i]);
    CHECK(ckpt.opt.v[i] == st.v[i]);
  }

  Model<float> restored = restore_model(ckpt);
  auto pa = model.parameters();
  auto pb = restored.parameters();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pa[i].size; ++j)
      CHECK(pa[i].data[j] == pb[i].data[j]);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint resume is bit-equivalent to an uninterrupted run") {
  ModelConfig mc;
  mc.channels = 6;
  mc.blocks_per_stage = 1;
  mc.seed = 33;
  TrainConfig tc;
  tc.epochs = 4;
  tc.batch_size = 2;
  tc.seed = 55;
  PatchSet set = random_patches(5, 16, 5);

  auto straight = build_model<float>(mc);
  OptimizerState st1;
  train(straight, set, tc, st1);

  auto resumed = build_model<float>(mc);
  OptimizerState st2;
  TrainConfig half = tc;
  half.epochs = 2;
  train(resumed, set, half, st2);
  const std::string path = temp_path("dmcn_test_resume.bin");
  save_checkpoint(path, resumed, st2, 1, {});
  Checkpoint ckpt = load_checkpoint(path);
  Model<float> cont = restore_model(ckpt);
  OptimizerState st3 = ckpt.opt;
  train(cont, set, tc, st3, ckpt.epoch + 1);

  auto pa = straight.parameters();
  auto pb = cont.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pa[i].size; ++j)
      CHECK(pa[i].data[j] == pb[i].data[j]);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint error paths") {
  ModelConfig mc;
  mc.channels = 4;
  mc.blocks_per_stage = 0;
  auto model = build_model<float>(mc);
  OptimizerState st;
  const std::string path = temp_path("dmcn_test_bad.bin");
  save_checkpoint(path, model, st, 0, {});

  SUBCASE("truncated file reports a byte offset, no partial model") {
    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    bytes.resize(bytes.size() / 2);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("byte"),
                         parse_error);
  }

  SUBCASE("mismatched config names the first divergent tensor") {
    Checkpoint ckpt = load_checkpoint(path);
    ModelConfig other = mc;
    other.channels = 8;
    Model<float> wrong = build_model<float>(other);
    CHECK_THROWS_WITH_AS(apply_checkpoint(ckpt, wrong),
                         doctest::Contains("input.weight"), contract_error);
  }

  SUBCASE("bad magic") {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "NOPE garbage";
    out.close();
    CHECK_THROWS_AS(load_checkpoint(path), parse_error);
  }
  std::remove(path.c_str());
}
