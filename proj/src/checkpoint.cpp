#include <cstdint>
#include <cstring>
#include <fstream>

#include "dmcn/train.hpp"

namespace dmcn {
namespace {

constexpr char kMagic[4] = {'D', 'M', 'C', 'N'};
constexpr std::uint32_t kVersion = 1;

// All multi-byte fields little-endian.
struct Writer {
  std::ofstream out;

  explicit Writer(const std::string& path)
      : out(path, std::ios::binary | std::ios::trunc) {
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  }
  void u32(std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
  }
  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }
  void tensor(const std::string& name, const std::vector<int>& dims,
              const float* data, std::size_t size) {
    u32(static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    u32(static_cast<std::uint32_t>(dims.size()));
    for (int d : dims) u32(static_cast<std::uint32_t>(d));
    for (std::size_t i = 0; i < size; ++i) f32(data[i]);
  }
  void scalar(const std::string& name, float v) { tensor(name, {1}, &v, 1); }
  // 32-bit integers round-trip exactly as two 16-bit halves.
  void u32_pair(const std::string& name, std::uint32_t v) {
    float halves[2] = {static_cast<float>(v & 0xFFFFu),
                       static_cast<float>(v >> 16)};
    tensor(name, {2}, halves, 2);
  }
};

struct Reader {
  std::ifstream in;
  std::size_t offset = 0;
  std::string path;

  explicit Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
    if (!in) throw parse_error("load_checkpoint: cannot open " + p);
  }
  void raw(void* dst, std::size_t n) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
      throw parse_error("load_checkpoint: " + path +
                        " truncated at byte offset " + std::to_string(offset));
    offset += n;
  }
  std::uint32_t u32() {
    unsigned char b[4];
    raw(b, 4);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }
  float f32() {
    std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  bool at_eof() {
    return in.peek() == std::ifstream::traits_type::eof();
  }
};

float get_scalar(const Checkpoint& c, const std::string& name) {
  auto it = c.tensors.find(name);
  if (it == c.tensors.end())
    throw parse_error("load_checkpoint: missing record '" + name + "'");
  return it->second.second.at(0);
}

std::uint32_t get_u32_pair(const Checkpoint& c, const std::string& name) {
  auto it = c.tensors.find(name);
  if (it == c.tensors.end())
    throw parse_error("load_checkpoint: missing record '" + name + "'");
  const auto& v = it->second.second;
  return static_cast<std::uint32_t>(v.at(0)) +
         (static_cast<std::uint32_t>(v.at(1)) << 16);
}

}  // namespace

void save_checkpoint(const std::string& path, Model<float>& model,
                     const OptimizerState& opt, int epoch,
                     const std::vector<float>& loss_history) {
  Writer w(path);
  w.out.write(kMagic, 4);
  w.u32(kVersion);

  const ModelConfig& cfg = model.config;
  w.scalar("config.channels", static_cast<float>(cfg.channels));
  w.scalar("config.kernel", static_cast<float>(cfg.kernel));
  w.scalar("config.blocks_per_stage", static_cast<float>(cfg.blocks_per_stage));
  w.scalar("config.enable_local_memory", cfg.enable_local_memory ? 1.f : 0.f);
  w.scalar("config.enable_global_memory", cfg.enable_global_memory ? 1.f : 0.f);
  w.scalar("config.enable_hourglass", cfg.enable_hourglass ? 1.f : 0.f);
  w.scalar("config.input_channels", static_cast<float>(cfg.input_channels));
  w.u32_pair("config.seed", cfg.seed);
  w.scalar("train.epoch", static_cast<float>(epoch));
  if (!loss_history.empty())
    w.tensor("train.loss_history",
             {static_cast<int>(loss_history.size())}, loss_history.data(),
             loss_history.size());
  w.u32_pair("opt.t", static_cast<std::uint32_t>(opt.t));

  auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    w.tensor(p.name, p.dims, p.data, p.size);
    if (i < opt.m.size()) {
      w.tensor("opt.m." + p.name, p.dims, opt.m[i].data(), opt.m[i].size());
      w.tensor("opt.v." + p.name, p.dims, opt.v[i].data(), opt.v[i].size());
    }
  }
  if (!w.out) throw std::runtime_error("save_checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  Reader r(path);
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw parse_error("load_checkpoint: " + path +
                      " has bad magic at byte offset 0");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw parse_error("load_checkpoint: unsupported format version " +
                      std::to_string(version));

  Checkpoint ckpt;
  while (!r.at_eof()) {
    const std::uint32_t name_len = r.u32();
    if (name_len > 4096)
      throw parse_error("load_checkpoint: implausible name length at byte "
                        "offset " + std::to_string(r.offset - 4));
    std::string name(name_len, '\0');
    r.raw(name.data(), name_len);
    const std::uint32_t rank = r.u32();
    if (rank > 8)
      throw parse_error("load_checkpoint: implausible rank at byte offset " +
                        std::to_string(r.offset - 4));
    std::vector<int> dims(rank);
    std::size_t count = 1;
    for (auto& d : dims) {
      d = static_cast<int>(r.u32());
      count *= static_cast<std::size_t>(d);
    }
    std::vector<float> data(count);
    for (auto& v : data) v = r.f32();
    ckpt.tensors[name] = {std::move(dims), std::move(data)};
  }

  ckpt.model_config.channels = static_cast<int>(get_scalar(ckpt, "config.channels"));
  ckpt.model_config.kernel = static_cast<int>(get_scalar(ckpt, "config.kernel"));
  ckpt.model_config.blocks_per_stage =
      static_cast<int>(get_scalar(ckpt, "config.blocks_per_stage"));
  ckpt.model_config.enable_local_memory =
      get_scalar(ckpt, "config.enable_local_memory") != 0.f;
  ckpt.model_config.enable_global_memory =
      get_scalar(ckpt, "config.enable_global_memory") != 0.f;
  ckpt.model_config.enable_hourglass =
      get_scalar(ckpt, "config.enable_hourglass") != 0.f;
  ckpt.model_config.input_channels =
      static_cast<int>(get_scalar(ckpt, "config.input_channels"));
  ckpt.model_config.seed = get_u32_pair(ckpt, "config.seed");
  ckpt.epoch = static_cast<int>(get_scalar(ckpt, "train.epoch"));
  if (auto it = ckpt.tensors.find("train.loss_history"); it != ckpt.tensors.end())
    ckpt.loss_history = it->second.second;
  ckpt.opt.t = static_cast<long>(get_u32_pair(ckpt, "opt.t"));

  // Moments in parameter order of a model built from the stored config.
  Model<float> probe = build_model<float>(ckpt.model_config);
  for (const auto& p : probe.parameters()) {
    auto m = ckpt.tensors.find("opt.m." + p.name);
    auto v = ckpt.tensors.find("opt.v." + p.name);
    if (m == ckpt.tensors.end() || v == ckpt.tensors.end()) {
      ckpt.opt.m.clear();
      ckpt.opt.v.clear();
      break;
    }
    ckpt.opt.m.push_back(m->second.second);
    ckpt.opt.v.push_back(v->second.second);
  }
  return ckpt;
}

void apply_checkpoint(const Checkpoint& ckpt, Model<float>& model) {
  for (auto& p : model.parameters()) {
    auto it = ckpt.tensors.find(p.name);
    if (it == ckpt.tensors.end())
      throw contract_error("apply_checkpoint: checkpoint lacks tensor '" +
                           p.name + "'");
    if (it->second.first != p.dims)
      throw contract_error("apply_checkpoint: tensor '" + p.name +
                           "' shape differs from the model's");
    std::memcpy(p.data, it->second.second.data(), p.size * sizeof(float));
  }
}

Model<float> restore_model(const Checkpoint& ckpt) {
  Model<float> model = build_model<float>(ckpt.model_config);
  apply_checkpoint(ckpt, model);
  return model;
}

}  // namespace dmcn
